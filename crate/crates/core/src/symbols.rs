//! Dispersion symbol, the sextic characteristic roots of the Laplace-transformed
//! operator, and the Cramer kernel of the boundary system.
//!
//! Writing `z = γ²`, the characteristic equation
//! `γ⁶ − αβγ⁴ + α²γ² − ρ² = 0` becomes the cubic `z³ − αβz² + α²z − ρ² = 0`.
//! Each cubic root contributes the square root with negative real part, so a
//! [`RootSystem`] always holds three decaying modes `e^{γ_j x}`.
//!
//! The boundary system has rows `(1,1,1)`, `(γ_j²)`, `(γ_j⁴)`, i.e. it is a
//! Vandermonde system in `z_j`; its inverse is given by Lagrange interpolation
//! and is what the boundary operator integrates.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

const EPS: f64 = f64::EPSILON;

/// Relative cutoff for `|Δ|` against the cube of the largest `|z_j|`.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Dispersion data `(α, β)` of `u_tt − α²u_xx + αβu_xxxx − u_xxxxxx = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSymbol {
    alpha: f64,
    beta: f64,
}

impl PhaseSymbol {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidSymbol(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if beta != 1.0 && beta != -1.0 {
            return Err(Error::InvalidSymbol(format!(
                "beta must be +1 or -1, got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha_beta(&self) -> f64 {
        self.alpha * self.beta
    }

    /// `φ(ξ)² = ξ⁶ + αβξ⁴ + α²ξ²`. The quartic factor has negative
    /// discriminant for |β| = 1, so the radicand is never negative.
    pub fn phase_squared(&self, xi: f64) -> f64 {
        let x2 = xi * xi;
        x2 * (x2 * x2 + self.alpha_beta() * x2 + self.alpha * self.alpha)
    }

    pub fn phase(&self, xi: f64) -> f64 {
        self.phase_squared(xi).sqrt()
    }

    /// `dφ/dμ` for `μ ≥ 0`, i.e. `(3μ⁴ + 2αβμ² + α²)/√(μ⁴ + αβμ² + α²)`.
    pub fn phase_derivative(&self, mu: f64) -> f64 {
        let m2 = mu * mu;
        let ab = self.alpha_beta();
        let a2 = self.alpha * self.alpha;
        (3.0 * m2 * m2 + 2.0 * ab * m2 + a2) / (m2 * m2 + ab * m2 + a2).sqrt()
    }

    /// The `μ ≥ 0` with `φ(μ) = λ`; φ is strictly increasing on `[0, ∞)`.
    pub fn inverse_phase(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        let mut lo = 0.0;
        let mut hi = lambda.cbrt().max(lambda / self.alpha) + 1.0;
        while self.phase(hi) < lambda {
            hi *= 2.0;
        }
        let mut mu = lambda.cbrt().clamp(lo, hi);
        for _ in 0..200 {
            let f = self.phase(mu) - lambda;
            if f > 0.0 {
                hi = mu;
            } else {
                lo = mu;
            }
            let d = self.phase_derivative(mu);
            let mut next = mu - f / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - mu).abs() <= 4.0 * EPS * next.abs().max(1e-300) {
                return next;
            }
            mu = next;
        }
        mu
    }

    /// Value of the sextic characteristic polynomial at `γ`.
    pub fn characteristic(&self, gamma: C64, rho: C64) -> C64 {
        let g2 = gamma * gamma;
        ((g2 - self.alpha_beta()) * g2 + self.alpha * self.alpha) * g2 - rho * rho
    }

    /// Characteristic residual scaled by `max(1, |ρ|²)`.
    pub fn characteristic_residual(&self, gamma: C64, rho: C64) -> f64 {
        self.characteristic(gamma, rho).norm() / rho.norm_sqr().max(1.0)
    }
}

/// `(1 + |x − √y³ − (αβ/2)√y|) / (1 + |x − φ(√y)|)` for `x, y ≥ 0`: the ratio
/// of the KdV-type modulation weight to the exact one.
pub fn equivalence_ratio(sym: &PhaseSymbol, x: f64, y: f64) -> f64 {
    let ab = sym.alpha_beta();
    let a = sym.alpha();
    let sy = y.sqrt();
    let num = 1.0 + (x - y * sy - 0.5 * ab * sy).abs();
    let den = 1.0 + (x - (y * y * y + ab * y * y + a * a * y).sqrt()).abs();
    num / den
}

/// Largest gap `|φ(√y) − √y³ − (αβ/2)√y|` for `y ∈ [0, y_max]` on `n` samples.
pub fn equivalence_gap(sym: &PhaseSymbol, y_max: f64, n: usize) -> f64 {
    let ab = sym.alpha_beta();
    let a = sym.alpha();
    (0..=n)
        .map(|i| {
            let y = y_max * i as f64 / n as f64;
            let sy = y.sqrt();
            ((y * y * y + ab * y * y + a * a * y).sqrt() - y * sy - 0.5 * ab * sy).abs()
        })
        .fold(0.0, f64::max)
}

/// Sampled `sup` of the equivalence ratio and of its reciprocal over
/// `[0, x_max] × [0, y_max]`.
pub fn equivalence_sup(sym: &PhaseSymbol, x_max: f64, y_max: f64, n: usize) -> (f64, f64) {
    let mut sup = 0.0_f64;
    let mut sup_inv = 0.0_f64;
    for i in 0..=n {
        let x = x_max * i as f64 / n as f64;
        for j in 0..=n {
            let y = y_max * j as f64 / n as f64;
            let r = equivalence_ratio(sym, x, y);
            sup = sup.max(r);
            sup_inv = sup_inv.max(1.0 / r);
        }
    }
    (sup, sup_inv)
}

/// Roots of the monic cubic `z³ + a z² + b z + c` by Aberth–Ehrlich iteration
/// followed by a Newton polish.
pub fn cubic_roots(a: C64, b: C64, c: C64) -> [C64; 3] {
    let p = |z: C64| ((z + a) * z + b) * z + c;
    let dp = |z: C64| (3.0 * z + 2.0 * a) * z + b;

    let scale = a
        .norm()
        .max(b.norm().sqrt())
        .max(c.norm().cbrt())
        .max(1e-300);
    let center = -a / 3.0;
    let mut z = [C64::new(0.0, 0.0); 3];
    for (k, zk) in z.iter_mut().enumerate() {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / 3.0 + 0.4;
        *zk = center + C64::from_polar(1.5 * scale, angle);
    }

    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for i in 0..3 {
            let pz = p(z[i]);
            if pz == C64::new(0.0, 0.0) {
                continue;
            }
            let ratio = pz / dp(z[i]);
            let mut repulsion = C64::new(0.0, 0.0);
            for j in 0..3 {
                if j != i {
                    repulsion += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * repulsion);
            if w.is_finite() {
                z[i] -= w;
                max_step = max_step.max(w.norm() / z[i].norm().max(scale * EPS));
            }
        }
        if max_step <= 4.0 * EPS {
            break;
        }
    }

    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = dp(*zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = p(*zi) / d;
            if !step.is_finite() {
                break;
            }
            let cand = *zi - step;
            if p(cand).norm() <= p(*zi).norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
    z
}

/// Three decaying characteristic roots at one Laplace node together with the
/// Vandermonde determinant and the cofactors of the boundary system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSystem {
    pub rho: C64,
    pub roots: [C64; 3],
    /// `Δ = (γ₂²−γ₁²)(γ₃²−γ₁²)(γ₃²−γ₂²)`.
    pub delta: C64,
    /// Cofactor determinants `Δ_{j,m}`, row `j`, column `m`.
    pub delta_jm: [[C64; 3]; 3],
    /// `Δ_{j,m}/Δ`, evaluated by Lagrange interpolation rather than division.
    pub kernel: [[C64; 3]; 3],
}

impl RootSystem {
    /// Builds the determinant data for arbitrary roots. No degeneracy check.
    pub fn from_roots(rho: C64, roots: [C64; 3]) -> Self {
        let z = roots.map(|g| g * g);
        let delta = (z[1] - z[0]) * (z[2] - z[0]) * (z[2] - z[1]);
        let mut kernel = [[C64::new(0.0, 0.0); 3]; 3];
        for j in 0..3 {
            let k = (j + 1) % 3;
            let l = (j + 2) % 3;
            let d = (z[j] - z[k]) * (z[j] - z[l]);
            kernel[j][0] = z[k] * z[l] / d;
            kernel[j][1] = -(z[k] + z[l]) / d;
            kernel[j][2] = 1.0 / d;
        }
        let delta_jm = kernel.map(|row| row.map(|v| v * delta));
        Self {
            rho,
            roots,
            delta,
            delta_jm,
            kernel,
        }
    }

    pub fn z_roots(&self) -> [C64; 3] {
        self.roots.map(|g| g * g)
    }

    /// `|Δ|` threshold below which the system is treated as degenerate.
    pub fn degeneracy_tol(&self) -> f64 {
        let zmax = self.z_roots().iter().map(|z| z.norm()).fold(1.0, f64::max);
        DEGENERACY_TOL * zmax.powi(3)
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.delta.norm() > self.degeneracy_tol())
    }

    /// `|Δ − Π_{i<j}(γ_j² − γ_i²)| / |Δ|`.
    pub fn vandermonde_defect(&self) -> f64 {
        let z = self.z_roots();
        let prod = (z[1] - z[0]) * (z[2] - z[0]) * (z[2] - z[1]);
        (self.delta - prod).norm() / self.delta.norm()
    }

    /// The mode coefficients `c_j = Σ_m (Δ_{j,m}/Δ) h̃_m` for given transforms.
    pub fn mode_coefficients(&self, h_tilde: &[C64; 3]) -> [C64; 3] {
        let mut c = [C64::new(0.0, 0.0); 3];
        for (j, cj) in c.iter_mut().enumerate() {
            for m in 0..3 {
                *cj += self.kernel[j][m] * h_tilde[m];
            }
        }
        c
    }
}

/// Solves the boundary system with rows `(1,1,1)`, `(γ_j²)`, `(γ_j⁴)`.
pub fn cramer_coefficients(rs: &RootSystem, h_tilde: &[C64; 3]) -> Result<[C64; 3]> {
    let tol = rs.degeneracy_tol();
    if !(rs.delta.norm() > tol) {
        return Err(Error::DegenerateSystem {
            delta: rs.delta.norm(),
            tol,
        });
    }
    Ok(rs.mode_coefficients(h_tilde))
}

/// Decaying roots at `ρ` (sign chosen by `Re γ < 0`).
pub fn characteristic_roots(sym: &PhaseSymbol, rho: C64) -> Result<RootSystem> {
    characteristic_roots_with_hint(sym, rho, None)
}

/// As [`characteristic_roots`]; a root lying on the imaginary axis takes the
/// sign closest to the hinted roots instead of failing.
pub fn characteristic_roots_with_hint(
    sym: &PhaseSymbol,
    rho: C64,
    hint: Option<&[C64; 3]>,
) -> Result<RootSystem> {
    if rho.norm() == 0.0 || !rho.is_finite() {
        return Err(Error::DegenerateRoots { rho, delta: 0.0 });
    }
    let z = cubic_roots(
        C64::new(-sym.alpha_beta(), 0.0),
        C64::new(sym.alpha() * sym.alpha(), 0.0),
        -rho * rho,
    );
    let mut roots = [C64::new(0.0, 0.0); 3];
    for (g, zj) in roots.iter_mut().zip(z.iter()) {
        let r = zj.sqrt();
        let on_cut = zj.re < 0.0 && zj.im.abs() <= 8.0 * EPS * zj.norm();
        *g = if on_cut {
            match hint {
                Some(h) => {
                    let dist = |c: C64| h.iter().map(|v| (c - v).norm()).fold(f64::MAX, f64::min);
                    if dist(-r) <= dist(r) {
                        -r
                    } else {
                        r
                    }
                }
                None => return Err(Error::AmbiguousSign { rho, root: -r }),
            }
        } else {
            -r
        };
    }
    let rs = RootSystem::from_roots(rho, roots);
    if rs.is_degenerate() {
        return Err(Error::DegenerateRoots {
            rho,
            delta: rs.delta.norm(),
        });
    }
    Ok(rs)
}

/// A piecewise-linear path in the ρ-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourPath {
    pub segments: Vec<(C64, C64)>,
    /// Gauss–Legendre nodes per panel and panels per segment.
    pub order: usize,
    pub panels: usize,
}

/// One quadrature node on a contour; `weight` already contains `dρ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourNode {
    pub rho: C64,
    pub weight: C64,
}

impl ContourPath {
    /// The rectangle `−iH → 1−iH → 1+iH → iH` with `H = φ(1)`, which meets the
    /// oscillatory part of the boundary operator at `ρ = ±iφ(1)`.
    pub fn standard(sym: &PhaseSymbol) -> Self {
        Self::rectangle(1.0, sym.phase(1.0), 32, 4)
    }

    pub fn rectangle(re: f64, height: f64, order: usize, panels: usize) -> Self {
        let a = C64::new(0.0, -height);
        let b = C64::new(re, -height);
        let c = C64::new(re, height);
        let d = C64::new(0.0, height);
        Self {
            segments: vec![(a, b), (b, c), (c, d)],
            order,
            panels,
        }
    }

    pub fn segment(from: C64, to: C64, order: usize, panels: usize) -> Self {
        Self {
            segments: vec![(from, to)],
            order,
            panels,
        }
    }

    pub fn refined(&self, factor: usize) -> Self {
        Self {
            panels: self.panels * factor,
            ..self.clone()
        }
    }

    /// Composite Gauss–Legendre nodes ordered along the path.
    pub fn nodes(&self) -> Vec<ContourNode> {
        let rule = crate::quadrature::legendre(self.order);
        let mut out = Vec::with_capacity(self.segments.len() * self.panels * self.order);
        for &(from, to) in &self.segments {
            let dir = to - from;
            for p in 0..self.panels {
                let s0 = p as f64 / self.panels as f64;
                let s1 = (p + 1) as f64 / self.panels as f64;
                let half = 0.5 * (s1 - s0);
                for &(x, w) in rule.iter() {
                    let s = s0 + half * (x + 1.0);
                    out.push(ContourNode {
                        rho: from + dir * s,
                        weight: dir * (w * half),
                    });
                }
            }
        }
        out
    }

    /// `n` equispaced points per segment, endpoints included once.
    pub fn sample_points(&self, n: usize) -> Vec<C64> {
        let n = n.max(2);
        let mut out = Vec::new();
        for (i, &(from, to)) in self.segments.iter().enumerate() {
            let start = usize::from(i > 0);
            for k in start..n {
                out.push(from + (to - from) * (k as f64 / (n - 1) as f64));
            }
        }
        out
    }
}

/// Labels roots consistently along an ordered list of nodes. The first node is
/// sorted by `(Re, Im)`; later nodes follow nearest-neighbour continuation.
pub fn track_roots(sym: &PhaseSymbol, nodes: &[C64]) -> Result<Vec<RootSystem>> {
    let mut out: Vec<RootSystem> = Vec::with_capacity(nodes.len());
    for (i, &rho) in nodes.iter().enumerate() {
        let hint = out.last().map(|rs| rs.roots);
        let rs = characteristic_roots_with_hint(sym, rho, hint.as_ref())?;
        let labelled = match out.last() {
            None => {
                let mut r = rs.roots;
                r.sort_by(|a, b| {
                    a.re.partial_cmp(&b.re)
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
                });
                r
            }
            Some(prev) => match_roots(&prev.roots, &rs.roots)
                .ok_or(Error::TrackingFailure { node: i, rho })?,
        };
        out.push(RootSystem::from_roots(rho, labelled));
    }
    Ok(out)
}

/// Tracks roots through the quadrature nodes of `path`, with `n_nodes`
/// Gauss–Legendre nodes per segment.
pub fn track_roots_along_contour(
    sym: &PhaseSymbol,
    path: &ContourPath,
    n_nodes: usize,
) -> Result<Vec<RootSystem>> {
    let p = ContourPath {
        order: n_nodes.max(2),
        panels: 1,
        ..path.clone()
    };
    let rhos: Vec<C64> = p.nodes().iter().map(|n| n.rho).collect();
    track_roots(sym, &rhos)
}

/// Reorders `next` so that `next[j]` continues `prev[j]`; `None` when any
/// match is within 10% of the runner-up distance.
fn match_roots(prev: &[C64; 3], next: &[C64; 3]) -> Option<[C64; 3]> {
    let mut out = [C64::new(0.0, 0.0); 3];
    let mut used = [false; 3];
    for (j, p) in prev.iter().enumerate() {
        let mut d: Vec<(f64, usize)> = next
            .iter()
            .enumerate()
            .map(|(k, q)| ((q - p).norm(), k))
            .collect();
        d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        if d[1].0 <= 1.1 * d[0].0 {
            return None;
        }
        let k = d[0].1;
        if used[k] {
            return None;
        }
        used[k] = true;
        out[j] = next[k];
    }
    Some(out)
}

/// Roots on the oscillatory part of the contour, `ρ = iφ(μ)` approached from
/// `Re ρ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryRootData {
    pub mu: f64,
    /// `(−iμ, −p−iq, −p+iq)`.
    pub gamma_plus: [C64; 3],
    pub p: f64,
    pub q: f64,
}

impl OscillatoryRootData {
    /// The root `z₊` of the quadratic factor with positive imaginary part.
    pub fn quadratic_root(&self, sym: &PhaseSymbol) -> C64 {
        quadratic_factor_root(sym, self.mu)
    }

    pub fn root_system(&self, sym: &PhaseSymbol) -> RootSystem {
        RootSystem::from_roots(C64::new(0.0, sym.phase(self.mu)), self.gamma_plus)
    }
}

/// `z₊ = [(αβ+μ²) + i√(3μ⁴+2αβμ²+3α²)]/2`, a root of the quadratic
/// `z² − (αβ+μ²)z + (μ⁴+αβμ²+α²)` left after dividing out `z = −μ²`.
pub fn quadratic_factor_root(sym: &PhaseSymbol, mu: f64) -> C64 {
    let m2 = mu * mu;
    let ab = sym.alpha_beta();
    let a2 = sym.alpha() * sym.alpha();
    C64::new(
        0.5 * (ab + m2),
        0.5 * (3.0 * m2 * m2 + 2.0 * ab * m2 + 3.0 * a2).sqrt(),
    )
}

/// Oscillatory roots for `μ > 0` (the boundary operator uses `μ ≥ 1`).
///
/// `p + iq = √z₊` is taken from the quadratic factor of the cubic in `γ²`.
pub fn oscillatory_roots(sym: &PhaseSymbol, mu: f64) -> OscillatoryRootData {
    assert!(mu > 0.0, "oscillatory roots need mu > 0");
    let w = quadratic_factor_root(sym, mu).sqrt();
    let (p, q) = (w.re, w.im);
    OscillatoryRootData {
        mu,
        gamma_plus: [C64::new(0.0, -mu), C64::new(-p, -q), C64::new(-p, q)],
        p,
        q,
    }
}

/// Worst-case diagnostics of [`characteristic_roots`] over random samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootCensus {
    pub samples: usize,
    /// Largest [`PhaseSymbol::characteristic_residual`] over all roots.
    pub max_residual: f64,
    pub max_vandermonde_defect: f64,
    /// Samples whose three roots did not all satisfy `Re γ < 0`.
    pub wrong_half_plane: usize,
    /// Samples where root finding failed.
    pub failures: usize,
}

/// Draws `(α, β, ρ)` with `α ∈ (0, 1]`, `β = ±1` and `Re ρ > 0`, `|ρ|`
/// log-uniform in `[10⁻², 10³]`, and checks the decaying roots.
pub fn root_census<R: rand::Rng>(samples: usize, rng: &mut R) -> RootCensus {
    let mut out = RootCensus {
        samples,
        max_residual: 0.0,
        max_vandermonde_defect: 0.0,
        wrong_half_plane: 0,
        failures: 0,
    };
    for _ in 0..samples {
        let alpha = 1.0 - rng.gen::<f64>() * 0.99;
        let beta = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let sym = PhaseSymbol::new(alpha, beta).expect("parameters drawn in range");
        let modulus = 10f64.powf(rng.gen_range(-2.0..3.0));
        let angle = rng.gen_range(-1.5..1.5);
        let rho = C64::from_polar(modulus, angle);
        match characteristic_roots(&sym, rho) {
            Ok(rs) => {
                if rs.roots.iter().any(|g| !(g.re < 0.0)) {
                    out.wrong_half_plane += 1;
                }
                for g in rs.roots {
                    out.max_residual = out.max_residual.max(sym.characteristic_residual(g, rho));
                }
                out.max_vandermonde_defect = out.max_vandermonde_defect.max(rs.vandermonde_defect());
            }
            Err(_) => out.failures += 1,
        }
    }
    out
}

/// Largest distance, relative to `max(1, μ)`, between the oscillatory roots
/// and the decaying roots at `ρ = ε + iφ(μ)` with `ε = 10⁻⁹φ(μ)`.
pub fn oscillatory_limit_gap(sym: &PhaseSymbol, mus: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &mu in mus {
        let osc = oscillatory_roots(sym, mu);
        let w = sym.phase(mu);
        let near = characteristic_roots(sym, C64::new(1e-9 * w, w))?;
        for g in osc.gamma_plus {
            let d = near.roots.iter().map(|r| (r - g).norm()).fold(f64::MAX, f64::min);
            worst = worst.max(d / mu.max(1.0));
        }
    }
    Ok(worst)
}
