//! Nonlinear quarter-plane solver: λ-rescaling, the contraction map Γ and its
//! Picard iteration.
//!
//! Γ is assembled on the grid nodes with `x ≥ 0` and `0 ≤ t < 2`:
//!
//! ```text
//! Γ(u) = η [ W_R(φ*, ψ*) + W_bdr(h⃗ − p⃗) + D(f*) − W_bdr(q⃗) ],   f = −u²,
//! ```
//!
//! where `D(f)` solves `v_tt + 𝓛v = f_xx` from zero data, `p⃗` and `q⃗` are the
//! `(·, ∂²_x·, ∂⁴_x·)` traces at `x = 0` of the two whole-line pieces, and `f*` is
//! a smooth extension of `f` to `x < 0`. The sign of `f` makes fixed points
//! solve `u_tt − α²u_xx + αβu_xxxx − u_xxxxxx + (u²)_xx = 0`.

use crate::boundary::{BoundaryConfig, BoundaryPlan, BoundaryTriple, EvalWindow};
use crate::error::{Error, Result};
use crate::fd;
use crate::field::{spectrum_1d, synthesis_1d, Representation, SpectralField};
use crate::grid::{eta, signed_bin, CutoffSpec, SpaceTimeGrid};
use crate::norms::{composite_norm, halfline_slice_sup, NormSpec};
use crate::propagator::{
    duhamel, free_evolution, free_evolution_derivative, trace_triple, InitialPair, Traces,
};
use crate::series::Profile;
use crate::symbols::PhaseSymbol;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PicardConfig {
    pub max_iter: usize,
    pub rel_tol: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self {
            max_iter: 40,
            rel_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub s: f64,
    pub sigma: f64,
    pub beta: f64,
    pub grid: SpaceTimeGrid,
    pub cutoff: CutoffSpec,
    pub picard: PicardConfig,
    pub boundary: BoundaryConfig,
    pub lambda_max: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            s: -0.7,
            sigma: 0.505,
            beta: 1.0,
            grid: SpaceTimeGrid::default(),
            cutoff: CutoffSpec::default(),
            picard: PicardConfig::default(),
            boundary: BoundaryConfig::default(),
            lambda_max: 64.0,
        }
    }
}

/// `σ₀(s) = 7/12 − (−s)/9`.
pub fn sigma_zero(s: f64) -> f64 {
    7.0 / 12.0 + s / 9.0
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.s > -0.75 && self.s <= -0.5) {
            return Err(Error::InvalidConfig(format!(
                "s must lie in (-3/4, -1/2], got {}",
                self.s
            )));
        }
        let s0 = sigma_zero(self.s);
        if !(self.sigma > 0.5 && self.sigma <= s0) {
            return Err(Error::InvalidConfig(format!(
                "sigma must lie in (1/2, {s0:.6}] for s = {}, got {}",
                self.s, self.sigma
            )));
        }
        if self.beta != 1.0 && self.beta != -1.0 {
            return Err(Error::InvalidConfig(format!("beta must be +1 or -1, got {}", self.beta)));
        }
        if !(self.picard.rel_tol > 0.0) || self.picard.max_iter == 0 {
            return Err(Error::InvalidConfig(
                "picard.rel_tol must be positive and max_iter at least 1".into(),
            ));
        }
        if !(self.lambda_max >= 1.0) {
            return Err(Error::InvalidConfig("lambda_max must be at least 1".into()));
        }
        if !(self.cutoff.inner > 0.0 && self.cutoff.outer > self.cutoff.inner) {
            return Err(Error::InvalidConfig("cutoff needs 0 < inner < outer".into()));
        }
        if self.cutoff.outer > self.grid.t_extent {
            return Err(Error::InvalidConfig(
                "the time window must contain the cutoff support".into(),
            ));
        }
        self.grid.validate()
    }

    pub fn norm_spec(&self) -> Result<NormSpec> {
        NormSpec::composite(self.s, self.sigma)
    }
}

/// Initial data `u(x,0) = φ`, `u_t(x,0) = ψ''` and lateral data `h⃗`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemData {
    pub phi: Profile,
    pub psi: Profile,
    pub boundary: BoundaryTriple,
}

impl ProblemData {
    pub fn zero(s: f64) -> Self {
        Self {
            phi: Profile::Zero,
            psi: Profile::Zero,
            boundary: BoundaryTriple::zero(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.phi.is_zero() && self.psi.is_zero() && self.boundary.is_zero()
    }

    pub fn initial_pair(&self, grid: SpaceTimeGrid) -> InitialPair {
        InitialPair::from_fns(grid, |x| self.phi.eval(x), |x| self.psi.eval(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub lambda: f64,
}

impl ScalingParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 1.0) {
            return Err(Error::InvalidConfig(format!("lambda must be >= 1, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    /// `α = λ^{−2}`.
    pub fn alpha(&self) -> f64 {
        self.lambda.powi(-2)
    }
}

/// `φ^λ = λ^{−4}φ(·/λ)`, `ψ^λ = λ^{−5}ψ(·/λ)`, `h_k^λ = λ^{−4,−6,−8} h_k(·/λ³)`.
pub fn rescale_data(d: &ProblemData, sp: &ScalingParams, grid: &SpaceTimeGrid) -> Result<ProblemData> {
    let l = sp.lambda;
    let out = ProblemData {
        phi: d.phi.rescaled(l.powi(-4), l),
        psi: d.psi.rescaled(l.powi(-5), l),
        boundary: BoundaryTriple {
            h: [
                d.boundary.h[0].rescaled(l.powi(-4), l.powi(3)),
                d.boundary.h[1].rescaled(l.powi(-6), l.powi(3)),
                d.boundary.h[2].rescaled(l.powi(-8), l.powi(3)),
            ],
            s: d.boundary.s,
        },
    };
    for (name, p) in [("phi", &out.phi), ("psi", &out.psi)] {
        if p.is_zero() {
            continue;
        }
        let (_, b) = p.support();
        let last = grid.x(grid.nx - 1);
        if b > last {
            return Err(Error::ResampleOutOfWindow(format!(
                "{name} rescaled by lambda = {l} reaches x = {b:.3} beyond the grid edge {last:.3}"
            )));
        }
    }
    Ok(out)
}

/// Reflection coefficients `a_k` with `Σ_k a_k (−k)^j = 1`, `j = 0..=3`.
const REFLECT: [f64; 4] = [10.0, -20.0, 15.0, -4.0];

/// Smooth extension of the `x ≥ 0` half of every time column to `x < 0`:
/// `u(−x) = χ(x) Σ_k a_k u(kx)`, which matches three derivatives at `x = 0`.
/// The cutoff `χ` equals one on `|x| ≤ 1/2` and vanishes for `|x| ≥ 2`, so the
/// reflected forcing stays small and `4|x|` stays inside the grid.
pub fn reflect_extend(u: &SpectralField) -> Result<SpectralField> {
    u.expect(Representation::Physical)?;
    let g = u.grid;
    let i0 = g.x0_index();
    let chi = CutoffSpec {
        inner: 0.5f64.min(g.x_extent / 20.0),
        outer: 2.0f64.min(g.x_extent / 5.0),
    };
    let mut out = u.clone();
    for j in 1..=i0 {
        let x = j as f64 * g.dx();
        let w = eta(&chi, x);
        for n in 0..g.nt {
            let mut v = C64::new(0.0, 0.0);
            if w > 0.0 {
                for (k, a) in REFLECT.iter().enumerate() {
                    let idx = i0 + (k + 1) * j;
                    if idx < g.nx {
                        v += u.values[[idx, n]] * *a;
                    }
                }
            }
            out.values[[i0 - j, n]] = v * w;
        }
    }
    Ok(out)
}

/// Removes modes with `|k| > n/3` from every time column.
fn dealias(u: &SpectralField) -> SpectralField {
    let g = u.grid;
    let mut out = u.clone();
    for n in 0..g.nt {
        let col: Vec<C64> = (0..g.nx).map(|i| u.values[[i, n]]).collect();
        if col.iter().all(|v| *v == C64::new(0.0, 0.0)) {
            continue;
        }
        let mut spec = spectrum_1d(&col, g.dx());
        for (k, v) in spec.iter_mut().enumerate() {
            if 3 * signed_bin(k, g.nx).unsigned_abs() as usize > g.nx {
                *v = C64::new(0.0, 0.0);
            }
        }
        for (i, v) in synthesis_1d(&spec, g.dx()).into_iter().enumerate() {
            out.values[[i, n]] = v;
        }
    }
    out
}

/// The forcing `f* = −(ũ)²` built from the smooth extension `ũ` of `u`, with
/// the 2/3 rule applied before and after squaring.
pub fn nonlinear_forcing(u: &SpectralField) -> Result<SpectralField> {
    let ext = dealias(&reflect_extend(u)?);
    let sq = SpectralField {
        values: ext.values.mapv(|v| C64::new(-v.re * v.re, 0.0)),
        ..ext
    };
    Ok(dealias(&sq))
}

/// Keeps the nodes with `x ≥ 0` and `0 ≤ t < t_stop`, multiplied by `η(t)`.
fn restrict_quarter(f: &SpectralField, cutoff: &CutoffSpec) -> SpectralField {
    let g = f.grid;
    let mut out = SpectralField::zeros(g, Representation::Physical);
    for i in g.x0_index()..g.nx {
        for n in g.t0_index()..g.nt {
            let t = g.t(n);
            if t >= cutoff.outer {
                break;
            }
            out.values[[i, n]] = C64::new(f.values[[i, n]].re * eta(cutoff, t), 0.0);
        }
    }
    out
}

fn triple_from_traces(tr: &Traces, cutoff: &CutoffSpec, s: f64) -> BoundaryTriple {
    let w = |t: f64| eta(cutoff, t);
    let get = |j: u32| tr.to_series(j, cutoff.outer, w).unwrap_or(Profile::Zero);
    BoundaryTriple::new(get(0), get(2), get(4), s)
}

/// One evaluation of Γ with the pieces needed to inspect it at `x = 0`.
#[derive(Debug, Clone)]
pub struct GammaEval {
    pub field: SpectralField,
    /// Spatially-dual forcing `f*` that produced the Duhamel term.
    forcing: Option<SpectralField>,
    duhamel_traces: Option<Traces>,
    q_plan: Option<BoundaryPlan>,
}

/// Γ for fixed (rescaled) data, with the data-dependent pieces precomputed.
#[derive(Debug, Clone)]
pub struct GammaMap {
    pub sym: PhaseSymbol,
    pub cfg: SolverConfig,
    linear: SpectralField,
    data: InitialPair,
    free_traces: Traces,
    /// `(+1, W_bdr(ηh⃗))` and `(−1, W_bdr(ηp⃗))`.
    plans: Vec<(f64, BoundaryPlan)>,
    pub warnings: Vec<String>,
}

/// Share of the `∂⁴_x`-trace energy of the free evolution carried by modes
/// whose frequency `φ(ξ)` exceeds the temporal Nyquist limit `π/Δt`.
pub fn temporal_aliasing_share(data: &InitialPair, sym: &PhaseSymbol) -> f64 {
    let g = data.grid;
    let nyquist = std::f64::consts::PI / g.dt();
    let spec = |v: &[f64]| spectrum_1d(&v.iter().map(|&r| C64::new(r, 0.0)).collect::<Vec<_>>(), g.dx());
    let (f1, f2) = (spec(&data.phi), spec(&data.psi));
    let (mut total, mut fast) = (0.0, 0.0);
    for k in 0..g.nx {
        let xi = g.xi(k);
        let e = xi.powi(8)
            * (f1[k].norm_sqr() + (f2[k] * crate::propagator::velocity_multiplier(sym, xi)).norm_sqr());
        total += e;
        if sym.phase(xi) > nyquist {
            fast += e;
        }
    }
    if total > 0.0 {
        fast / total
    } else {
        0.0
    }
}

fn grid_window(grid: &SpaceTimeGrid, t_stop: f64) -> Result<EvalWindow> {
    let n0 = grid.t0_index();
    EvalWindow::new(
        (grid.x0_index()..grid.nx).map(|i| grid.x(i)).collect(),
        (n0..grid.nt).map(|n| grid.t(n)).take_while(|&t| t < t_stop).collect(),
    )
}

fn boundary_piece(
    h: &BoundaryTriple,
    sym: &PhaseSymbol,
    cfg: &SolverConfig,
) -> Result<(SpectralField, Option<BoundaryPlan>)> {
    if h.is_zero() {
        return Ok((SpectralField::zeros(cfg.grid, Representation::Physical), None));
    }
    let window = grid_window(&cfg.grid, cfg.cutoff.outer)?;
    let plan = BoundaryPlan::new(h, sym, &cfg.boundary, &window)?;
    let field = place_on_grid(&cfg.grid, &plan.total(&window, 0, 0, &cfg.boundary)?);
    Ok((field, Some(plan)))
}

/// Physical field holding `w[[i, n]]` at node `(x0 + i, t0 + n)` and zero elsewhere.
fn place_on_grid(grid: &SpaceTimeGrid, w: &ndarray::Array2<f64>) -> SpectralField {
    let mut field = SpectralField::zeros(*grid, Representation::Physical);
    let (i0, n0) = (grid.x0_index(), grid.t0_index());
    for ((i, n), v) in w.indexed_iter() {
        field.values[[i0 + i, n0 + n]] = C64::new(*v, 0.0);
    }
    field
}

impl GammaMap {
    pub fn new(d: &ProblemData, sym: &PhaseSymbol, cfg: &SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid;
        let data = d.initial_pair(grid).zero_extended();
        let mut warnings = Vec::new();
        let share = temporal_aliasing_share(&data, sym);
        if share > 0.01 {
            warnings.push(format!(
                "{:.1}% of the fourth-order trace energy oscillates faster than the time grid resolves",
                100.0 * share
            ));
        }
        let free = free_evolution(&data, sym);
        let free_traces = trace_triple(&free)?;
        let h = BoundaryTriple {
            h: d.boundary.h.clone().map(|p| p.windowed(&cfg.cutoff)),
            s: d.boundary.s,
        };
        let p = triple_from_traces(&free_traces, &cfg.cutoff, d.boundary.s);
        let (wh, plan_h) = boundary_piece(&h, sym, cfg)?;
        let (wp, plan_p) = boundary_piece(&p, sym, cfg)?;
        let sum = free.to_physical().add(&wh)?.sub(&wp)?;
        let linear = restrict_quarter(&sum, &cfg.cutoff);
        let mut plans = Vec::new();
        if let Some(pl) = plan_h {
            plans.push((1.0, pl));
        }
        if let Some(pl) = plan_p {
            plans.push((-1.0, pl));
        }
        Ok(Self {
            sym: *sym,
            cfg: *cfg,
            linear,
            data,
            free_traces,
            plans,
            warnings,
        })
    }

    /// `Γ(0)`.
    pub fn linear_part(&self) -> &SpectralField {
        &self.linear
    }

    /// Traces `∂_x^j` at `x = 0` of the free evolution of the extended data.
    pub fn free_traces(&self) -> &Traces {
        &self.free_traces
    }

    pub fn apply(&self, u: &SpectralField) -> Result<GammaEval> {
        u.expect(Representation::Physical)?;
        let quarter = restrict_quarter(u, &CutoffSpec { inner: f64::MAX / 4.0, outer: f64::MAX / 2.0 });
        if quarter.values.iter().all(|v| v.norm() == 0.0) {
            return Ok(GammaEval {
                field: self.linear.clone(),
                forcing: None,
                duhamel_traces: None,
                q_plan: None,
            });
        }
        let f = nonlinear_forcing(&quarter)?;
        let d = duhamel(&f, &self.sym);
        let traces = trace_triple(&d)?;
        let q = triple_from_traces(&traces, &self.cfg.cutoff, self.cfg.s);
        let (wq, plan_q) = boundary_piece(&q, &self.sym, &self.cfg)?;
        let nl = restrict_quarter(&d.to_physical().sub(&wq)?, &self.cfg.cutoff);
        Ok(GammaEval {
            field: self.linear.add(&nl)?,
            forcing: Some(f.to_spatial_dual()),
            duhamel_traces: Some(traces),
            q_plan: plan_q,
        })
    }

    /// `∂_t²` of `Γ(u)/η` on the nodes with `x ≥ 0` and `0 ≤ t < outer`, built
    /// from the exact time dependence of each piece. It equals `∂_t²Γ(u)`
    /// wherever `η ≡ 1`.
    pub fn second_time_derivative(&self, eval: &GammaEval) -> Result<SpectralField> {
        let g = self.cfg.grid;
        let mut whole = free_evolution_derivative(&self.data, &self.sym, 2);
        if let Some(f) = &eval.forcing {
            // D_tt = −𝓛D + f_xx, mode by mode.
            let d = duhamel(&f.to_physical(), &self.sym);
            for ((k, n), v) in whole.values.indexed_iter_mut() {
                let xi = g.xi(k);
                let w2 = self.sym.phase_squared(xi);
                *v += -d.values[[k, n]] * w2 - f.values[[k, n]] * (xi * xi);
            }
        }
        let mut out = whole.to_physical();
        let window = grid_window(&g, self.cfg.cutoff.outer)?;
        let plans = self
            .plans
            .iter()
            .map(|(s, p)| (*s, p))
            .chain(eval.q_plan.iter().map(|p| (-1.0, p)));
        let mut bdr = SpectralField::zeros(g, Representation::Physical);
        for (sign, plan) in plans {
            let w = place_on_grid(&g, &plan.total(&window, 0, 2, &self.cfg.boundary)?);
            bdr = bdr.add(&w.scale(sign))?;
        }
        out = out.add(&bdr)?;
        let unit = CutoffSpec {
            inner: f64::MAX / 4.0,
            outer: self.cfg.cutoff.outer,
        };
        Ok(restrict_quarter(&out, &unit))
    }

    /// `∂_x^j Γ(u)(0, t)` for `t` on the grid in `[0, t_stop)`, from the exact
    /// pieces: spectral traces of the whole-line parts and the x-derivative of
    /// the boundary operator.
    pub fn boundary_trace(&self, eval: &GammaEval, j: u32) -> Result<(Vec<f64>, Vec<f64>)> {
        let g = self.cfg.grid;
        let window = EvalWindow::new(vec![0.0], grid_window(&g, self.cfg.cutoff.outer)?.ts)?;
        let n0 = g.t0_index();
        let idx = |tr: &Traces| tr.orders.iter().position(|&o| o == j);
        let mut out: Vec<f64> = window
            .ts
            .iter()
            .enumerate()
            .map(|(k, _)| {
                let mut v = idx(&self.free_traces).map_or(0.0, |p| self.free_traces.values[p][n0 + k]);
                if let Some(tr) = &eval.duhamel_traces {
                    v += idx(tr).map_or(0.0, |p| tr.values[p][n0 + k]);
                }
                v
            })
            .collect();
        let mut add = |sign: f64, plan: &BoundaryPlan| -> Result<()> {
            let w = plan.total(&window, j, 0, &self.cfg.boundary)?;
            for (k, o) in out.iter_mut().enumerate() {
                *o += sign * w[[0, k]];
            }
            Ok(())
        };
        for (sign, plan) in &self.plans {
            add(*sign, plan)?;
        }
        if let Some(plan) = &eval.q_plan {
            add(-1.0, plan)?;
        }
        let ts = window.ts;
        for (o, &t) in out.iter_mut().zip(&ts) {
            *o *= eta(&self.cfg.cutoff, t);
        }
        Ok((ts, out))
    }
}

/// `Γ(u)` for data `d` (already rescaled).
pub fn gamma_map(u: &SpectralField, d: &ProblemData, sym: &PhaseSymbol, cfg: &SolverConfig) -> Result<SpectralField> {
    Ok(GammaMap::new(d, sym, cfg)?.apply(u)?.field)
}

#[derive(Debug, Clone)]
pub struct PicardReport {
    pub solution: SpectralField,
    pub iterations: usize,
    /// `‖u_{n+1} − u_n‖` in the composite norm.
    pub increments: Vec<f64>,
    /// `‖u_{n+1} − u_n‖ / ‖u_n − u_{n−1}‖`.
    pub contraction_ratios: Vec<f64>,
    /// `‖Γ(u*) − u*‖ / ‖u*‖`.
    pub residual: f64,
    pub composite_norm: f64,
    /// `sup_{t∈[0,1]}` of the zero-extension `H^s(ℝ⁺)` proxy.
    pub hs_slice_sup: f64,
    pub map: GammaMap,
    pub last: GammaEval,
}

impl PicardReport {
    pub fn boundary_trace(&self, j: u32) -> Result<(Vec<f64>, Vec<f64>)> {
        self.map.boundary_trace(&self.last, j)
    }
}

/// Iterates `u_{n+1} = Γ(u_n)` from `u_0 = Γ(0)`.
pub fn picard_solve(d: &ProblemData, sym: &PhaseSymbol, cfg: &SolverConfig) -> Result<PicardReport> {
    let map = GammaMap::new(d, sym, cfg)?;
    picard_with_map(map)
}

fn picard_with_map(map: GammaMap) -> Result<PicardReport> {
    let spec = map.cfg.norm_spec()?;
    let norm = |f: &SpectralField| composite_norm(&f.to_dual(), &map.sym, &spec);
    let mut current = map.apply(&SpectralField::zeros(map.cfg.grid, Representation::Physical))?;
    let mut increments = Vec::new();
    let mut ratios = Vec::new();
    let mut above_one = 0;
    let mut iterations = 1;
    loop {
        let u_norm = norm(&current.field)?;
        if u_norm == 0.0 {
            return finish(map, current, increments, ratios, iterations, 0.0);
        }
        if iterations >= map.cfg.picard.max_iter {
            return Err(Error::MaxIterExceeded(iterations));
        }
        let next = map.apply(&current.field)?;
        iterations += 1;
        let inc = norm(&next.field.sub(&current.field)?)?;
        if let Some(prev) = increments.last() {
            let r = if *prev > 0.0 { inc / prev } else { 0.0 };
            ratios.push(r);
            above_one = if r >= 1.0 { above_one + 1 } else { 0 };
            if above_one >= 3 {
                return Err(Error::NoContraction {
                    iteration: iterations,
                    ratios,
                });
            }
        }
        increments.push(inc);
        current = next;
        if !inc.is_finite() {
            return Err(Error::NoContraction {
                iteration: iterations,
                ratios,
            });
        }
        if inc <= map.cfg.picard.rel_tol * u_norm {
            let u_norm = norm(&current.field)?;
            return finish(map, current, increments, ratios, iterations, u_norm);
        }
    }
}

fn finish(
    map: GammaMap,
    last: GammaEval,
    increments: Vec<f64>,
    contraction_ratios: Vec<f64>,
    iterations: usize,
    u_norm: f64,
) -> Result<PicardReport> {
    let spec = map.cfg.norm_spec()?;
    let residual = if u_norm == 0.0 {
        0.0
    } else {
        let again = map.apply(&last.field)?;
        composite_norm(&again.field.sub(&last.field)?.to_dual(), &map.sym, &spec)? / u_norm
    };
    let hs_slice_sup = halfline_slice_sup(&last.field, map.cfg.s, 0.0, map.cfg.cutoff.inner)?;
    Ok(PicardReport {
        solution: last.field.clone(),
        iterations,
        increments,
        contraction_ratios,
        residual,
        composite_norm: u_norm,
        hs_slice_sup,
        map,
        last,
    })
}

/// Max of `|u_tt − α²u_xx + αβu_xxxx − u_xxxxxx + c·(u²)_xx|` over grid nodes
/// with `x ∈ xr`, `t ∈ tr`, `x ≥ 0`, together with the largest linear term as
/// a scale. Spatial derivatives are width-15 finite differences on the
/// `x ≥ 0` half, so `xr` should stay a few cells away from both ends.
pub fn interior_residual(
    u: &SpectralField,
    utt: &SpectralField,
    sym: &PhaseSymbol,
    coupling: f64,
    xr: (f64, f64),
    tr: (f64, f64),
) -> Result<(f64, f64)> {
    u.expect(Representation::Physical)?;
    utt.expect(Representation::Physical)?;
    u.check_grid(utt)?;
    let g = u.grid;
    let (a, ab) = (sym.alpha(), sym.alpha_beta());
    let (i0, dx) = (g.x0_index(), g.dx());
    let (mut res, mut scale) = (0.0f64, 0.0f64);
    for n in 0..g.nt {
        if !(tr.0..=tr.1).contains(&g.t(n)) {
            continue;
        }
        let col: Vec<f64> = (i0..g.nx).map(|i| u.values[[i, n]].re).collect();
        let sq: Vec<f64> = col.iter().map(|v| v * v).collect();
        for i in 0..col.len() {
            if !(xr.0..=xr.1).contains(&g.x(i0 + i)) {
                continue;
            }
            let d2 = fd::derivative(&col, dx, i, 2, 15);
            let d4 = fd::derivative(&col, dx, i, 4, 15);
            let d6 = fd::derivative(&col, dx, i, 6, 15);
            let tt = utt.values[[i0 + i, n]].re;
            let mut r = tt - a * a * d2 + ab * d4 - d6;
            if coupling != 0.0 {
                r += coupling * fd::derivative(&sq, dx, i, 2, 15);
            }
            res = res.max(r.abs());
            scale = scale.max(tt.abs()).max(d6.abs()).max((a * a * d2).abs());
        }
    }
    Ok((res, scale))
}

impl PicardReport {
    /// [`interior_residual`] of the computed solution for the full equation.
    pub fn interior_residual(&self, xr: (f64, f64), tr: (f64, f64)) -> Result<(f64, f64)> {
        let utt = self.map.second_time_derivative(&self.last)?;
        interior_residual(&self.solution, &utt, &self.map.sym, 1.0, xr, tr)
    }
}

/// Solution of the rescaled problem together with the scaling used.
#[derive(Debug, Clone)]
pub struct ScaledSolution {
    pub lambda: f64,
    pub report: PicardReport,
}

impl ScaledSolution {
    /// Original coordinates `(x, t) = (x^λ/λ, t^λ/λ³)` of grid node `(i, n)`.
    pub fn original_coordinates(&self, i: usize, n: usize) -> (f64, f64) {
        let g = self.report.solution.grid;
        (g.x(i) / self.lambda, g.t(n) / self.lambda.powi(3))
    }

    /// `u(x,t) = λ⁴ u^λ(λx, λ³t)` at grid node `(i, n)`.
    pub fn original_value(&self, i: usize, n: usize) -> f64 {
        self.lambda.powi(4) * self.report.solution.values[[i, n]].re
    }

    /// Largest original time represented on the unit window of the rescaled problem.
    pub fn original_horizon(&self) -> f64 {
        self.report.map.cfg.cutoff.inner / self.lambda.powi(3)
    }
}

/// Solves after rescaling with a fixed `λ`.
pub fn solve_at_lambda(d: &ProblemData, cfg: &SolverConfig, lambda: f64) -> Result<ScaledSolution> {
    let sp = ScalingParams::new(lambda)?;
    let scaled = rescale_data(d, &sp, &cfg.grid)?;
    let sym = PhaseSymbol::new(sp.alpha(), cfg.beta)?;
    Ok(ScaledSolution {
        lambda,
        report: picard_solve(&scaled, &sym, cfg)?,
    })
}

/// Smallest `λ ∈ {1, 2, 4, …, λ_max}` for which the Picard iteration converges.
pub fn solve_full(d: &ProblemData, cfg: &SolverConfig) -> Result<ScaledSolution> {
    cfg.validate()?;
    let mut lambda = 1.0;
    while lambda <= cfg.lambda_max {
        match solve_at_lambda(d, cfg, lambda) {
            Ok(sol) => return Ok(sol),
            Err(Error::NoContraction { .. }) | Err(Error::MaxIterExceeded(_)) => {}
            Err(e) => return Err(e),
        }
        lambda *= 2.0;
    }
    Err(Error::LambdaExhausted(cfg.lambda_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> SpaceTimeGrid {
        SpaceTimeGrid::new(8.0, 64, 2.5, 40).unwrap()
    }

    #[test]
    fn reflection_coefficients_match_three_derivatives() {
        for j in 0..4 {
            let s: f64 = REFLECT
                .iter()
                .enumerate()
                .map(|(k, a)| a * (-((k + 1) as f64)).powi(j))
                .sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_extends_cubics() {
        let g = SpaceTimeGrid::new(16.0, 256, 2.0, 4).unwrap();
        let u = SpectralField::from_real_fn(g, |x, _| if x >= 0.0 { 1.0 + x - 2.0 * x * x + x * x * x } else { 0.0 });
        let e = reflect_extend(&u).unwrap();
        // The cutoff equals one on |x| <= 0.5, four cells here.
        for i in (g.x0_index() - 4)..g.x0_index() {
            let x = g.x(i);
            let want = 1.0 + x - 2.0 * x * x + x * x * x;
            assert!((e.values[[i, 1]].re - want).abs() < 1e-9, "{x}");
        }
    }

    #[test]
    fn config_ranges() {
        let mut c = SolverConfig::default();
        assert!(c.validate().is_ok());
        c.sigma = 0.55;
        assert!(c.validate().is_err());
        c.sigma = 0.505;
        c.s = -0.8;
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_data_give_zero_in_one_iteration() {
        let cfg = SolverConfig {
            grid: small_grid(),
            ..SolverConfig::default()
        };
        let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
        let rep = picard_solve(&ProblemData::zero(-0.7), &sym, &cfg).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.solution.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn lambda_one_is_identity() {
        let d = ProblemData {
            phi: Profile::bump(3.0, 1.0, 0.5),
            psi: Profile::Zero,
            boundary: BoundaryTriple::new(Profile::bump(0.5, 0.3, 1.0), Profile::Zero, Profile::Zero, -0.7),
        };
        let r = rescale_data(&d, &ScalingParams::new(1.0).unwrap(), &small_grid()).unwrap();
        assert_eq!(r, d);
    }
}
