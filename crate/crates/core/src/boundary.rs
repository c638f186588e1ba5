//! The boundary operator `W_bdr(h₁,h₂,h₃)`: the solution of the linear
//! quarter-plane problem with zero initial data and lateral data
//! `u = h₁, u_xx = h₂, u_xxxx = h₃` at `x = 0`.
//!
//! The inverse Laplace integral `(2πi)^{−1}∫ e^{ρt} ũ(x,ρ) dρ` is deformed onto
//! the rectangle `−iH → 1−iH → 1+iH → iH` followed by the imaginary axis
//! `|Im ρ| ≥ H`, with `H = φ(1)` so that the axis part starts at `μ = 1`.
//! On the axis, `ρ = iλ` with `λ = φ(μ)` and the roots are the one-sided limits
//! `(−iμ, −p−iq, −p+iq)`. The lower half of the axis contributes the complex
//! conjugate of the upper half because the data are real.

use crate::error::{Error, Result};
use crate::field::{Representation, SpectralField};
use crate::grid::SpaceTimeGrid;
use crate::series::{LaplaceRule, Profile};
use crate::symbols::{
    cramer_coefficients, oscillatory_roots, track_roots, ContourPath, PhaseSymbol, RootSystem,
};
use ndarray::{s, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Lateral data `(h₁, h₂, h₃)` with the regularity index `s` of the triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTriple {
    pub h: [Profile; 3],
    pub s: f64,
}

impl BoundaryTriple {
    pub fn new(h1: Profile, h2: Profile, h3: Profile, s: f64) -> Self {
        Self { h: [h1, h2, h3], s }
    }

    pub fn zero(s: f64) -> Self {
        Self::new(Profile::Zero, Profile::Zero, Profile::Zero, s)
    }

    /// `((s+1)/3, (s−1)/3, (s−3)/3)`.
    pub fn sobolev_indices(&self) -> [f64; 3] {
        [(self.s + 1.0) / 3.0, (self.s - 1.0) / 3.0, (self.s - 3.0) / 3.0]
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(Profile::is_zero)
    }

    pub fn validate(&self) -> Result<()> {
        self.h.iter().try_for_each(Profile::validate)
    }

    /// Latest time at which any channel is nonzero.
    pub fn support_end(&self) -> f64 {
        self.h
            .iter()
            .filter(|h| !h.is_zero())
            .map(|h| h.support().1)
            .fold(0.0, f64::max)
    }

    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let mix = |x: &Profile, y: &Profile| {
            Profile::Sum(vec![(a, x.clone()), (b, y.clone())])
        };
        Self {
            h: [
                mix(&self.h[0], &other.h[0]),
                mix(&self.h[1], &other.h[1]),
                mix(&self.h[2], &other.h[2]),
            ],
            s: self.s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundaryConfig {
    /// Gauss–Legendre order and panels per side of the rectangle.
    pub contour_order: usize,
    pub contour_panels: usize,
    /// Gauss–Legendre order of the oscillatory panels.
    pub osc_order: usize,
    /// Minimum nodes per period of the fastest phase in the oscillatory part.
    pub nodes_per_period: usize,
    pub mu_cap: f64,
    /// Cutoff for `Σ|h̃⁺_m(μ)|` relative to its value at `μ = 1`.
    pub tail_rel: f64,
    /// Largest tolerated tail relative to the accumulated value when `mu_cap` is hit.
    pub tail_abort: f64,
    /// Largest tolerated imaginary residue relative to the output scale.
    pub realness_tol: f64,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self {
            contour_order: 32,
            contour_panels: 4,
            osc_order: 16,
            nodes_per_period: 8,
            mu_cap: 200.0,
            tail_rel: 1e-8,
            tail_abort: 1e-6,
            realness_tol: 1e-8,
        }
    }
}

impl BoundaryConfig {
    /// Same configuration with every node count doubled.
    pub fn refined(&self) -> Self {
        Self {
            contour_panels: 2 * self.contour_panels,
            nodes_per_period: 2 * self.nodes_per_period,
            ..*self
        }
    }
}

/// Rectangular sampling window: `x ≥ 0` nodes and time nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalWindow {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
}

impl EvalWindow {
    pub fn new(xs: Vec<f64>, ts: Vec<f64>) -> Result<Self> {
        if xs.iter().any(|&x| x < 0.0) {
            return Err(Error::GridMismatch(
                "the boundary operator is evaluated on x >= 0 only".into(),
            ));
        }
        Ok(Self { xs, ts })
    }

    pub fn uniform(x0: f64, x1: f64, nx: usize, t0: f64, t1: f64, nt: usize) -> Result<Self> {
        let lin = |a: f64, b: f64, n: usize| -> Vec<f64> {
            if n == 1 {
                vec![a]
            } else {
                (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
            }
        };
        Self::new(lin(x0, x1, nx), lin(t0, t1, nt))
    }

    fn x_max(&self) -> f64 {
        self.xs.iter().copied().fold(0.0, f64::max)
    }

    fn t_abs_max(&self) -> f64 {
        self.ts.iter().map(|t| t.abs()).fold(0.0, f64::max)
    }
}

/// One quadrature node of the inverse Laplace integral. The integrand is
/// `weight · e^{ρt} · Σ_j coef_j e^{γ_j x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ModeNode {
    rho: C64,
    weight: C64,
    roots: [C64; 3],
    coef: [C64; 3],
}

/// Quadrature nodes of both parts of the operator for a fixed data triple.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPlan {
    contour: Vec<ModeNode>,
    oscillatory: Vec<ModeNode>,
    pub mu_max: f64,
    pub lambda_max: f64,
    /// `Σ_m|h̃⁺_m(μ_max)|` relative to its value at `μ = 1`.
    pub tail_ratio: f64,
    /// `Σ_m sup|h_m|`, sampled.
    data_scale: f64,
}

fn data_scale(h: &BoundaryTriple) -> f64 {
    h.h.iter()
        .map(|p| {
            let (a, b) = p.support();
            (0..=512)
                .map(|k| p.eval(a + (b - a) * k as f64 / 512.0).abs())
                .fold(0.0, f64::max)
        })
        .sum()
}

/// `Σ_m |h̃⁺_m|` at a given `λ`.
fn osc_magnitude(rules: &[LaplaceRule; 3], lambda: f64) -> f64 {
    rules
        .iter()
        .map(|r| r.eval(C64::new(0.0, lambda)).norm())
        .sum()
}

fn build_rules(h: &BoundaryTriple, max_freq: f64) -> Result<[LaplaceRule; 3]> {
    Ok([
        h.h[0].laplace_rule(max_freq)?,
        h.h[1].laplace_rule(max_freq)?,
        h.h[2].laplace_rule(max_freq)?,
    ])
}

/// Smallest `μ ≥ 1` beyond which `Σ|h̃⁺_m|` stays below `tail_rel` times its
/// value at `μ = 1`, together with the ratio reached there. The envelope is
/// checked on `[μ, 1.5μ]` so that isolated zeros of `h̃⁺` are not mistaken for
/// decay.
fn select_mu_max(
    h: &BoundaryTriple,
    sym: &PhaseSymbol,
    cfg: &BoundaryConfig,
    mu_limit: f64,
) -> Result<(f64, f64)> {
    let base_rules = build_rules(h, sym.phase(1.0))?;
    let base = osc_magnitude(&base_rules, sym.phase(1.0));
    if base == 0.0 {
        return Ok((1.0, 0.0));
    }
    let mut cap = 4.0_f64.min(mu_limit);
    loop {
        let rules = build_rules(h, sym.phase(1.5 * cap))?;
        let mut mu = 1.0;
        let mut last_ratio = 1.0;
        while mu <= cap {
            let envelope = (0..=8)
                .map(|k| osc_magnitude(&rules, sym.phase(mu * (1.0 + 0.5 * k as f64 / 8.0))))
                .fold(0.0, f64::max);
            last_ratio = envelope / base;
            if last_ratio < cfg.tail_rel {
                return Ok((mu, last_ratio));
            }
            mu *= 1.05;
        }
        if cap >= mu_limit {
            return Ok((mu_limit, last_ratio));
        }
        cap = (2.0 * cap).min(mu_limit);
    }
}

impl BoundaryPlan {
    pub fn new(
        h: &BoundaryTriple,
        sym: &PhaseSymbol,
        cfg: &BoundaryConfig,
        window: &EvalWindow,
    ) -> Result<Self> {
        Self::with_path(h, sym, cfg, &ContourPath::standard(sym), window)
    }

    pub fn with_path(
        h: &BoundaryTriple,
        sym: &PhaseSymbol,
        cfg: &BoundaryConfig,
        path: &ContourPath,
        window: &EvalWindow,
    ) -> Result<Self> {
        h.validate()?;
        let path = ContourPath {
            order: cfg.contour_order,
            panels: cfg.contour_panels,
            ..path.clone()
        };
        if h.is_zero() {
            return Ok(Self {
                contour: Vec::new(),
                oscillatory: Vec::new(),
                mu_max: 1.0,
                lambda_max: sym.phase(1.0),
                tail_ratio: 0.0,
                data_scale: 0.0,
            });
        }
        let contour = contour_nodes(h, sym, &path)?;

        // Sampled data carry no information above their Nyquist frequency.
        let nyquist = h
            .h
            .iter()
            .filter_map(Profile::sample_spacing)
            .reduce(f64::min)
            .map(|dt| PI / dt);
        let mu_limit = match nyquist {
            Some(w) => sym.inverse_phase(w).min(cfg.mu_cap).max(1.0),
            None => cfg.mu_cap,
        };
        let (mu_max, tail_ratio) = select_mu_max(h, sym, cfg, mu_limit)?;
        if nyquist.is_none() && tail_ratio > cfg.tail_abort {
            return Err(Error::TailTooFat {
                mu_max,
                ratio: tail_ratio,
            });
        }
        let lambda_max = sym.phase(mu_max);
        let oscillatory = oscillatory_nodes(h, sym, cfg, window, mu_max)?;
        Ok(Self {
            contour,
            oscillatory,
            mu_max,
            lambda_max,
            tail_ratio,
            data_scale: data_scale(h),
        })
    }

    pub fn node_counts(&self) -> (usize, usize) {
        (self.contour.len(), self.oscillatory.len())
    }

    /// Contour part `∂_x^k ∂_t^l W¹+W²+W³` on the window (complex).
    pub fn contour_part(&self, window: &EvalWindow, dx: u32, dt: u32) -> Array2<C64> {
        assemble(&self.contour, window, dx, dt)
    }

    /// Oscillatory part `Σ_m I_m + Ī_m` on the window (real up to roundoff).
    pub fn oscillatory_part(&self, window: &EvalWindow, dx: u32, dt: u32) -> Array2<C64> {
        let i = assemble(&self.oscillatory, window, dx, dt);
        i.mapv(|v| C64::new(2.0 * v.re, 0.0))
    }

    /// `∂_x^k ∂_t^l W_bdr` on the window, with the realness check applied.
    pub fn total(&self, window: &EvalWindow, dx: u32, dt: u32, cfg: &BoundaryConfig) -> Result<Array2<f64>> {
        let c = self.contour_part(window, dx, dt);
        let o = self.oscillatory_part(window, dx, dt);
        let sum = &c + &o;
        // Traces that vanish by construction are sums of cancelling terms, so
        // roundoff is judged against the size of the terms themselves.
        let scale = c
            .iter()
            .zip(o.iter())
            .map(|(a, b)| a.norm() + b.norm())
            .fold(0.0, f64::max);
        let imag = sum.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        let floor = 1e3 * f64::EPSILON * self.data_scale;
        if imag > cfg.realness_tol * scale + floor {
            return Err(Error::NonconvergentQuadrature(format!(
                "boundary operator output is not real: imaginary part {imag:e} against scale {scale:e}"
            )));
        }
        Ok(sum.mapv(|v| v.re))
    }
}

fn contour_nodes(h: &BoundaryTriple, sym: &PhaseSymbol, path: &ContourPath) -> Result<Vec<ModeNode>> {
    let nodes = path.nodes();
    let rhos: Vec<C64> = nodes.iter().map(|n| n.rho).collect();
    let systems = track_roots(sym, &rhos)?;
    let max_freq = rhos.iter().map(|r| r.im.abs()).fold(0.0, f64::max);
    let rules = build_rules(h, max_freq)?;
    let inv = 1.0 / C64::new(0.0, 2.0 * PI);
    nodes
        .iter()
        .zip(systems.iter())
        .map(|(node, rs)| {
            let ht = [
                rules[0].eval(node.rho),
                rules[1].eval(node.rho),
                rules[2].eval(node.rho),
            ];
            Ok(ModeNode {
                rho: node.rho,
                weight: node.weight * inv,
                roots: rs.roots,
                coef: cramer_coefficients(rs, &ht)?,
            })
        })
        .collect()
}

/// Panels in `λ ∈ [φ(1), φ(μ_max)]` sized to the local phase speed
/// `|t| + T_h + x·dμ/dλ` of the integrand.
fn oscillatory_nodes(
    h: &BoundaryTriple,
    sym: &PhaseSymbol,
    cfg: &BoundaryConfig,
    window: &EvalWindow,
    mu_max: f64,
) -> Result<Vec<ModeNode>> {
    let lam0 = sym.phase(1.0);
    let lam1 = sym.phase(mu_max);
    if !(lam1 > lam0) {
        return Ok(Vec::new());
    }
    let rules = build_rules(h, lam1)?;
    let t_rate = window.t_abs_max() + h.support_end();
    let x_max = window.x_max();
    let order = cfg.osc_order.max(2);
    let periods_per_panel = order as f64 / cfg.nodes_per_period.max(1) as f64;
    let gl = crate::quadrature::legendre(order);

    let mut edges = vec![lam0];
    let mut lam = lam0;
    while lam < lam1 {
        let mu = sym.inverse_phase(lam);
        let rate = t_rate + x_max / sym.phase_derivative(mu) + 1.0;
        let width = (periods_per_panel * 2.0 * PI / rate).min(lam1 - lam);
        lam += width;
        if lam1 - lam < 1e-9 * width {
            lam = lam1;
        }
        edges.push(lam);
    }

    let mut pts = Vec::with_capacity((edges.len() - 1) * order);
    for w in edges.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        for &(x, wt) in gl.iter() {
            pts.push((w[0] + half * (x + 1.0), wt * half));
        }
    }
    let inv = 1.0 / (2.0 * PI);
    pts.par_iter()
        .map(|&(lambda, wt)| {
            let osc = oscillatory_roots(sym, sym.inverse_phase(lambda));
            let rho = C64::new(0.0, lambda);
            let rs = RootSystem::from_roots(rho, osc.gamma_plus);
            let ht = [rules[0].eval(rho), rules[1].eval(rho), rules[2].eval(rho)];
            Ok(ModeNode {
                rho,
                weight: C64::new(wt * inv, 0.0),
                roots: rs.roots,
                coef: cramer_coefficients(&rs, &ht)?,
            })
        })
        .collect()
}

/// `Σ_n weight_n ρ_n^l e^{ρ_n t} Σ_j coef_{n,j} γ_{n,j}^k e^{γ_{n,j} x}` as a
/// product of an `(x, node)` and a `(node, t)` matrix, blocked over x rows.
fn assemble(nodes: &[ModeNode], window: &EvalWindow, dx: u32, dt: u32) -> Array2<C64> {
    let nx = window.xs.len();
    let nt = window.ts.len();
    let mut out = Array2::<C64>::zeros((nx, nt));
    if nodes.is_empty() || nx == 0 || nt == 0 {
        return out;
    }
    let b = Array2::from_shape_fn((nodes.len(), nt), |(n, k)| {
        let node = &nodes[n];
        node.weight * node.rho.powu(dt) * (node.rho * window.ts[k]).exp()
    });
    const BLOCK: usize = 16;
    let blocks: Vec<Array2<C64>> = window
        .xs
        .par_chunks(BLOCK)
        .map(|xs| {
            let a = Array2::from_shape_fn((xs.len(), nodes.len()), |(i, n)| {
                let node = &nodes[n];
                (0..3)
                    .map(|j| node.coef[j] * node.roots[j].powu(dx) * (node.roots[j] * xs[i]).exp())
                    .sum::<C64>()
            });
            a.dot(&b)
        })
        .collect();
    for (bi, block) in blocks.into_iter().enumerate() {
        let r0 = bi * BLOCK;
        out.slice_mut(s![r0..r0 + block.nrows(), ..]).assign(&block);
    }
    out
}

/// Contour part on a window, for a given path.
pub fn wbdr_contour(
    h: &BoundaryTriple,
    sym: &PhaseSymbol,
    path: &ContourPath,
    window: &EvalWindow,
) -> Result<Array2<C64>> {
    h.validate()?;
    if h.is_zero() {
        return Ok(Array2::zeros((window.xs.len(), window.ts.len())));
    }
    let nodes = contour_nodes(h, sym, path)?;
    Ok(assemble(&nodes, window, 0, 0))
}

/// Oscillatory part on a window with an explicit `μ_max`.
pub fn wbdr_oscillatory(
    h: &BoundaryTriple,
    sym: &PhaseSymbol,
    cfg: &BoundaryConfig,
    mu_max: f64,
    window: &EvalWindow,
) -> Result<Array2<C64>> {
    h.validate()?;
    if h.is_zero() {
        return Ok(Array2::zeros((window.xs.len(), window.ts.len())));
    }
    let nodes = oscillatory_nodes(h, sym, cfg, window, mu_max)?;
    Ok(assemble(&nodes, window, 0, 0).mapv(|v| C64::new(2.0 * v.re, 0.0)))
}

/// `W_bdr(h⃗)` on a window.
pub fn wbdr_total(
    h: &BoundaryTriple,
    sym: &PhaseSymbol,
    cfg: &BoundaryConfig,
    window: &EvalWindow,
) -> Result<Array2<f64>> {
    BoundaryPlan::new(h, sym, cfg, window)?.total(window, 0, 0, cfg)
}

/// `W_bdr(h⃗)` at the grid nodes with `x ≥ 0` and `0 ≤ t < t_stop`, zero
/// elsewhere, as a physical field.
pub fn wbdr_on_grid(
    h: &BoundaryTriple,
    sym: &PhaseSymbol,
    cfg: &BoundaryConfig,
    grid: &SpaceTimeGrid,
    t_stop: f64,
) -> Result<SpectralField> {
    let mut field = SpectralField::zeros(*grid, Representation::Physical);
    if h.is_zero() {
        return Ok(field);
    }
    let i0 = grid.x0_index();
    let n0 = grid.t0_index();
    let n1 = (n0..grid.nt).find(|&n| grid.t(n) >= t_stop).unwrap_or(grid.nt);
    let window = EvalWindow::new(
        (i0..grid.nx).map(|i| grid.x(i)).collect(),
        (n0..n1).map(|n| grid.t(n)).collect(),
    )?;
    let values = wbdr_total(h, sym, cfg, &window)?;
    field
        .values
        .slice_mut(s![i0.., n0..n1])
        .assign(&values.mapv(|v| C64::new(v, 0.0)));
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym() -> PhaseSymbol {
        PhaseSymbol::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn zero_data_gives_zero() {
        let w = EvalWindow::uniform(0.0, 2.0, 5, 0.0, 1.0, 5).unwrap();
        let u = wbdr_total(&BoundaryTriple::zero(-0.7), &sym(), &BoundaryConfig::default(), &w).unwrap();
        assert!(u.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn negative_x_is_rejected() {
        assert!(EvalWindow::new(vec![-1.0], vec![0.0]).is_err());
    }

    #[test]
    fn first_channel_is_reproduced_at_the_boundary() {
        let h = BoundaryTriple::new(
            Profile::bump(0.5, 0.3, 1.0),
            Profile::Zero,
            Profile::Zero,
            -0.7,
        );
        let ts: Vec<f64> = (0..=40).map(|k| k as f64 / 40.0).collect();
        let w = EvalWindow::new(vec![0.0], ts.clone()).unwrap();
        let u = wbdr_total(&h, &sym(), &BoundaryConfig::default(), &w).unwrap();
        let err: f64 = ts.iter().enumerate().map(|(k, &t)| (u[[0, k]] - h.h[0].eval(t)).powi(2)).sum();
        let norm: f64 = ts.iter().map(|&t| h.h[0].eval(t).powi(2)).sum();
        assert!((err / norm).sqrt() < 1e-3, "rel err {}", (err / norm).sqrt());
    }

    #[test]
    fn sobolev_indices_of_triple() {
        let h = BoundaryTriple::zero(-0.7);
        let [a, b, c] = h.sobolev_indices();
        assert!((a - 0.1).abs() < 1e-15 && (b + 0.566_666_666_666_666_6).abs() < 1e-15);
        assert!((c + 1.233_333_333_333_333_3).abs() < 1e-15);
    }
}
