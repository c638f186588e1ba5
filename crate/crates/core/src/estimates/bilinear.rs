//! Empirical constant of the bilinear estimate on a truncated `(ξ, τ)` lattice.
//!
//! By duality the estimate reduces to a trilinear form
//!
//! ```text
//! T(f₁,f₂,f₃) = Σ_{p₁+p₂+p₃=0} a(p₁)f₁(p₁) a(p₂)f₂(p₂) b(p₃)f₃(p₃),
//! a = ⟨ξ⟩^ρ / (⟨L⟩^{1/2} + χ_{|ξ|≤1}⟨L⟩^σ),
//! b = ξ² / (φ(ξ)⟨ξ⟩^{ρ−2}⟨L⟩^{1−σ}),   L = |τ| − |ξ|³ − (αβ/2)|ξ|,
//! ```
//!
//! with `ρ = −s`, `α = 1`, `β = −1`, and the constant is the supremum of `T`
//! over unit vectors. The weights factor, so each partial maximization is one
//! lattice convolution done by FFT. Alternating maximization never decreases
//! `T`, which makes warm starts from a nested lattice monotone.

use super::{RatioReport, SweepConfig};
use crate::error::{Error, Result};
use crate::norms::japanese;
use crate::symbols::PhaseSymbol;
use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::Rng;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Symmetric lattice `ξ = iΔξ`, `|i| ≤ m`, `τ = jΔτ`, `|j| ≤ m_τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearLattice {
    pub s: f64,
    pub sigma: f64,
    pub xi_spacing: f64,
    pub tau_spacing: f64,
    pub m: usize,
    pub m_tau: usize,
}

impl BilinearLattice {
    pub fn new(s: f64, sigma: f64, xi_spacing: f64, tau_spacing: f64, m: usize, m_tau: usize) -> Result<Self> {
        if !(sigma > 0.5 && sigma < 1.0) {
            return Err(Error::InvalidExponent(format!("sigma must lie in (1/2, 1), got {sigma}")));
        }
        if m == 0 || m_tau == 0 || !(xi_spacing > 0.0 && tau_spacing > 0.0) {
            return Err(Error::InvalidConfig("lattice needs positive sizes and spacings".into()));
        }
        Ok(Self {
            s,
            sigma,
            xi_spacing,
            tau_spacing,
            m,
            m_tau,
        })
    }

    /// Level `n`: `n/2` frequency steps each side, and a time-frequency
    /// radius covering the dispersion surface `|τ| ≈ |ξ|³` with margin.
    pub fn at_level(s: f64, sigma: f64, level: usize, cfg: &SweepConfig) -> Result<Self> {
        let m = level / 2;
        let radius = m as f64 * cfg.xi_spacing;
        let tau_radius = 1.1 * radius.powi(3) + radius + 8.0;
        let m_tau = (tau_radius / cfg.tau_spacing).ceil() as usize;
        Self::new(s, sigma, cfg.xi_spacing, cfg.tau_spacing, m, m_tau)
    }

    pub fn shape(&self) -> (usize, usize) {
        (2 * self.m + 1, 2 * self.m_tau + 1)
    }

    pub fn xi(&self, i: usize) -> f64 {
        (i as f64 - self.m as f64) * self.xi_spacing
    }

    pub fn tau(&self, j: usize) -> f64 {
        (j as f64 - self.m_tau as f64) * self.tau_spacing
    }

    /// `(a, b)` on the lattice.
    pub fn weights(&self) -> (Array2<f64>, Array2<f64>) {
        let sym = PhaseSymbol::new(1.0, -1.0).expect("fixed parameters are valid");
        let rho = -self.s;
        let ab = sym.alpha_beta();
        let a = Array2::from_shape_fn(self.shape(), |(i, j)| {
            let (xi, tau) = (self.xi(i), self.tau(j));
            let l = japanese(tau.abs() - xi.abs().powi(3) - 0.5 * ab * xi.abs());
            let low = if xi.abs() <= 1.0 { l.powf(self.sigma) } else { 0.0 };
            japanese(xi).powf(rho) / (l.sqrt() + low)
        });
        let b = Array2::from_shape_fn(self.shape(), |(i, j)| {
            let (xi, tau) = (self.xi(i), self.tau(j));
            if xi == 0.0 {
                return 0.0;
            }
            let l = japanese(tau.abs() - xi.abs().powi(3) - 0.5 * ab * xi.abs());
            xi * xi / (sym.phase(xi) * japanese(xi).powf(rho - 2.0) * l.powf(1.0 - self.sigma))
        });
        (a, b)
    }

    fn cell(&self) -> f64 {
        (self.xi_spacing * self.tau_spacing).sqrt()
    }

    /// Places `f` from a nested smaller lattice at the centre of this one.
    fn embed(&self, f: &Array2<f64>, from: &BilinearLattice) -> Array2<f64> {
        let mut out = Array2::zeros(self.shape());
        let (di, dj) = (self.m - from.m, self.m_tau - from.m_tau);
        for ((i, j), v) in f.indexed_iter() {
            out[[i + di, j + dj]] = *v;
        }
        out
    }
}

fn fast_size(min: usize) -> usize {
    (min..)
        .find(|&n| {
            let mut k = n;
            for p in [2, 3, 5] {
                while k % p == 0 {
                    k /= p;
                }
            }
            k == 1
        })
        .expect("smooth numbers are unbounded")
}

/// `out[p] = Σ_{p₁+p₂=−p} u(p₁)v(p₂)` on one lattice, via a padded 2-D FFT.
struct Convolver {
    shape: (usize, usize),
    centre: (usize, usize),
    p_xi: usize,
    p_tau: usize,
    fwd_tau: Arc<dyn Fft<f64>>,
    inv_tau: Arc<dyn Fft<f64>>,
    fwd_xi: Arc<dyn Fft<f64>>,
    inv_xi: Arc<dyn Fft<f64>>,
}

impl Convolver {
    fn new(lattice: &BilinearLattice) -> Self {
        let (m, mt) = (lattice.m, lattice.m_tau);
        // Sums needed lie in [m, 3m]; a period above 3m keeps them unaliased.
        let p_xi = fast_size(3 * m + 1);
        let p_tau = fast_size(3 * mt + 1);
        let mut planner = FftPlanner::new();
        Self {
            shape: lattice.shape(),
            centre: (m, mt),
            p_xi,
            p_tau,
            fwd_tau: planner.plan_fft_forward(p_tau),
            inv_tau: planner.plan_fft_inverse(p_tau),
            fwd_xi: planner.plan_fft_forward(p_xi),
            inv_xi: planner.plan_fft_inverse(p_xi),
        }
    }

    fn apply(&self, u: &Array2<f64>, v: &Array2<f64>) -> Array2<f64> {
        let (n_xi, n_tau) = self.shape;
        let (m, mt) = self.centre;
        let (p_xi, p_tau) = (self.p_xi, self.p_tau);
        // Both real inputs share one complex transform: z = u + iv.
        let mut t = vec![C64::new(0.0, 0.0); p_tau * p_xi];
        let mut row = vec![C64::new(0.0, 0.0); p_tau];
        for i in 0..n_xi {
            row.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
            for j in 0..n_tau {
                row[j] = C64::new(u[[i, j]], v[[i, j]]);
            }
            self.fwd_tau.process(&mut row);
            for (j, c) in row.iter().enumerate() {
                t[j * p_xi + i] = *c;
            }
        }
        for chunk in t.chunks_mut(p_xi) {
            self.fwd_xi.process(chunk);
        }
        // û·v̂ = (Z(k)² − conj(Z(−k))²) / 4i.
        let z = t.clone();
        for kt in 0..p_tau {
            let nt = (p_tau - kt) % p_tau;
            for kx in 0..p_xi {
                let nx = (p_xi - kx) % p_xi;
                let a = z[kt * p_xi + kx];
                let b = z[nt * p_xi + nx].conj();
                t[kt * p_xi + kx] = (a * a - b * b) / C64::new(0.0, 4.0);
            }
        }
        for chunk in t.chunks_mut(p_xi) {
            self.inv_xi.process(chunk);
        }
        let scale = 1.0 / (p_xi * p_tau) as f64;
        let mut out = Array2::zeros(self.shape);
        let mut col = vec![C64::new(0.0, 0.0); p_tau];
        for sx in m..=3 * m {
            for (j, c) in col.iter_mut().enumerate() {
                *c = t[j * p_xi + sx];
            }
            self.inv_tau.process(&mut col);
            let i3 = 3 * m - sx;
            for st in mt..=3 * mt {
                out[[i3, 3 * mt - st]] = (col[st].re * scale).max(0.0);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BilinearResult {
    pub lattice: BilinearLattice,
    pub constant: f64,
    pub iterations: usize,
    /// Maximizing unit vectors `(f₁, f₂, f₃)`.
    pub maximizers: [Array2<f64>; 3],
}

fn normalized(mut f: Array2<f64>) -> Array2<f64> {
    let n = f.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        f.mapv_inplace(|v| v / n);
    }
    f
}

/// `T(f₁, f₂, f₃)` including the lattice cell factor.
pub fn trilinear_value(lattice: &BilinearLattice, f: &[Array2<f64>; 3]) -> f64 {
    let (a, b) = lattice.weights();
    let conv = Convolver::new(lattice);
    let c = conv.apply(&(&a * &f[0]), &(&b * &f[2]));
    lattice.cell() * (&a * &f[1] * &c).sum()
}

fn maximize(
    lattice: &BilinearLattice,
    weights: &(Array2<f64>, Array2<f64>),
    conv: &Convolver,
    start: [Array2<f64>; 3],
    max_iter: usize,
    tol: f64,
) -> (f64, usize, [Array2<f64>; 3]) {
    let (a, b) = weights;
    let [mut f1, mut f2, mut f3] = start.map(normalized);
    let mut value = 0.0;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        f3 = normalized(b * &conv.apply(&(a * &f1), &(a * &f2)));
        f1 = normalized(a * &conv.apply(&(a * &f2), &(b * &f3)));
        let g2 = a * &conv.apply(&(a * &f1), &(b * &f3));
        let norm = g2.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return (0.0, it, [f1, f2, f3]);
        }
        f2 = g2 / norm;
        let next = lattice.cell() * norm;
        let done = (next - value).abs() <= tol * next;
        value = next;
        if done {
            break;
        }
    }
    (value, it, [f1, f2, f3])
}

/// Best value over a warm start (if given) and `restarts` random starts.
pub fn bilinear_constant<R: Rng>(
    lattice: &BilinearLattice,
    warm: Option<&BilinearResult>,
    restarts: usize,
    rng: &mut R,
    max_iter: usize,
    tol: f64,
) -> Result<BilinearResult> {
    let weights = lattice.weights();
    let conv = Convolver::new(lattice);
    let mut starts: Vec<[Array2<f64>; 3]> = Vec::new();
    if let Some(w) = warm {
        let from = &w.lattice;
        if from.m > lattice.m || from.m_tau > lattice.m_tau || from.xi_spacing != lattice.xi_spacing || from.tau_spacing != lattice.tau_spacing {
            return Err(Error::GridMismatch("warm start must come from a nested lattice".into()));
        }
        starts.push(w.maximizers.clone().map(|f| lattice.embed(&f, from)));
    }
    for _ in 0..restarts {
        starts.push(std::array::from_fn(|_| Array2::from_shape_fn(lattice.shape(), |_| rng.gen::<f64>())));
    }
    if starts.is_empty() {
        return Err(Error::InvalidConfig("bilinear maximization needs at least one start".into()));
    }
    let mut best: Option<BilinearResult> = None;
    for start in starts {
        let (constant, iterations, maximizers) = maximize(lattice, &weights, &conv, start, max_iter, tol);
        if best.as_ref().map_or(true, |b| constant > b.constant) {
            best = Some(BilinearResult {
                lattice: *lattice,
                constant,
                iterations,
                maximizers,
            });
        }
    }
    Ok(best.expect("at least one start"))
}

/// Constants along the level ladder, each level warm-started from the
/// previous one.
pub fn bilinear_sweep(s: f64, sigma: f64, cfg: &SweepConfig) -> Result<RatioReport> {
    cfg.validate()?;
    let mut rng = cfg.rng(3);
    let mut prev: Option<BilinearResult> = None;
    let mut ratios = Vec::new();
    for &n in &cfg.levels {
        let lattice = BilinearLattice::at_level(s, sigma, n, cfg)?;
        let res = bilinear_constant(&lattice, prev.as_ref(), cfg.restarts, &mut rng, cfg.power_iterations, cfg.power_tol)?;
        ratios.push(res.constant);
        prev = Some(res);
    }
    RatioReport::new(
        "bilinear",
        vec![("s".into(), s), ("sigma".into(), sigma)],
        cfg.levels.iter().map(|&n| n as f64).collect(),
        ratios,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute(u: &Array2<f64>, v: &Array2<f64>, l: &BilinearLattice) -> Array2<f64> {
        let (nx, nt) = l.shape();
        let (m, mt) = (l.m as isize, l.m_tau as isize);
        let mut out = Array2::zeros((nx, nt));
        for i3 in 0..nx as isize {
            for j3 in 0..nt as isize {
                let mut acc = 0.0;
                for i1 in 0..nx as isize {
                    let i2 = 3 * m - i3 - i1;
                    if !(0..nx as isize).contains(&i2) {
                        continue;
                    }
                    for j1 in 0..nt as isize {
                        let j2 = 3 * mt - j3 - j1;
                        if (0..nt as isize).contains(&j2) {
                            acc += u[[i1 as usize, j1 as usize]] * v[[i2 as usize, j2 as usize]];
                        }
                    }
                }
                out[[i3 as usize, j3 as usize]] = acc;
            }
        }
        out
    }

    #[test]
    fn fft_convolution_matches_direct_sum() {
        let l = BilinearLattice::new(-0.7, 0.6, 0.5, 1.0, 3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = Array2::from_shape_fn(l.shape(), |_| rng.gen::<f64>());
        let v = Array2::from_shape_fn(l.shape(), |_| rng.gen::<f64>());
        let fast = Convolver::new(&l).apply(&u, &v);
        let slow = brute(&u, &v, &l);
        for (a, b) in fast.iter().zip(slow.iter()) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn zero_vectors_give_zero() {
        let l = BilinearLattice::new(-0.7, 0.6, 0.5, 1.0, 4, 6).unwrap();
        let z = Array2::zeros(l.shape());
        assert_eq!(trilinear_value(&l, &[z.clone(), z.clone(), z]), 0.0);
    }

    #[test]
    fn maximization_is_monotone_under_nesting() {
        let cfg = SweepConfig {
            xi_spacing: 0.25,
            tau_spacing: 2.0,
            power_iterations: 60,
            ..SweepConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let small = BilinearLattice::at_level(-0.7, 0.55, 16, &cfg).unwrap();
        let big = BilinearLattice::at_level(-0.7, 0.55, 24, &cfg).unwrap();
        let a = bilinear_constant(&small, None, 1, &mut rng, 60, 1e-9).unwrap();
        let b = bilinear_constant(&big, Some(&a), 0, &mut rng, 60, 1e-9).unwrap();
        assert!(b.constant >= a.constant);
        let v = trilinear_value(&small, &a.maximizers);
        assert!((v - a.constant).abs() < 1e-9 * a.constant);
    }
}
