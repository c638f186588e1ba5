//! Whole-line free evolution, the Duhamel integral and traces at `x = 0`.
//!
//! Every operation acts independently on each spatial Fourier mode `ξ_k`.
//! With `m(ξ) = −ξ²/φ(ξ)` the free evolution reads
//! `û(ξ,t) = cos(tφ) f̂₁ + sin(tφ) m f̂₂`, so that `u(·,0) = f₁` and
//! `u_t(·,0) = f₂''`.

use crate::error::{Error, Result};
use crate::field::{Representation, SpectralField};
use crate::grid::SpaceTimeGrid;
use crate::series::Profile;
use crate::symbols::PhaseSymbol;
use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Initial data `u(·,0) = φ`, `u_t(·,0) = ψ''` sampled on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialPair {
    pub grid: SpaceTimeGrid,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

impl InitialPair {
    pub fn zero(grid: SpaceTimeGrid) -> Self {
        Self {
            grid,
            phi: vec![0.0; grid.nx],
            psi: vec![0.0; grid.nx],
        }
    }

    pub fn from_fns<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(grid: SpaceTimeGrid, phi: F, psi: G) -> Self {
        Self {
            grid,
            phi: grid.xs().into_iter().map(phi).collect(),
            psi: grid.xs().into_iter().map(psi).collect(),
        }
    }

    /// Zero extension `(φ*, ψ*)` of the restriction to `x ≥ 0`.
    pub fn zero_extended(&self) -> Self {
        let i0 = self.grid.x0_index();
        let cut = |v: &[f64]| -> Vec<f64> {
            v.iter()
                .enumerate()
                .map(|(i, &x)| if i < i0 { 0.0 } else { x })
                .collect()
        };
        Self {
            grid: self.grid,
            phi: cut(&self.phi),
            psi: cut(&self.psi),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.phi.iter().chain(&self.psi).all(|v| *v == 0.0)
    }
}

/// `m(ξ) = −ξ²/φ(ξ)`, with the limit value 0 at `ξ = 0`.
pub fn velocity_multiplier(sym: &PhaseSymbol, xi: f64) -> f64 {
    if xi == 0.0 {
        0.0
    } else {
        -xi * xi / sym.phase(xi)
    }
}

fn spectrum(values: &[f64], dx: f64) -> Vec<C64> {
    let v: Vec<C64> = values.iter().map(|&r| C64::new(r, 0.0)).collect();
    crate::field::spectrum_1d(&v, dx)
}

/// Free evolution on all time nodes of the grid, in spatially-dual form.
pub fn free_evolution(data: &InitialPair, sym: &PhaseSymbol) -> SpectralField {
    free_evolution_derivative(data, sym, 0)
}

/// `∂_t^l` of the free evolution (`l ≤ 2`), in spatially-dual form.
pub fn free_evolution_derivative(data: &InitialPair, sym: &PhaseSymbol, l: u32) -> SpectralField {
    let g = data.grid;
    let f1 = spectrum(&data.phi, g.dx());
    let f2 = spectrum(&data.psi, g.dx());
    let ts = g.ts();
    let values = Array2::from_shape_fn((g.nx, g.nt), |(k, n)| {
        let xi = g.xi(k);
        let w = sym.phase(xi);
        let a = f1[k];
        let b = f2[k] * velocity_multiplier(sym, xi);
        let (s, c) = (ts[n] * w).sin_cos();
        match l {
            0 => a * c + b * s,
            1 => (b * c - a * s) * w,
            _ => -(a * c + b * s) * (w * w),
        }
    });
    SpectralField {
        grid: g,
        repr: Representation::SpatialDual,
        values,
    }
}

/// Per-mode energy `φ²|û|² + |û_t|²` of the free evolution at bin `k`, time `t`.
pub fn mode_energy(data: &InitialPair, sym: &PhaseSymbol, k: usize, n: usize) -> f64 {
    let u = free_evolution_derivative(data, sym, 0);
    let v = free_evolution_derivative(data, sym, 1);
    let w = sym.phase(data.grid.xi(k));
    w * w * u.values[[k, n]].norm_sqr() + v.values[[k, n]].norm_sqr()
}

/// `∫_0^1 σ^p e^{−iθσ} dσ` for `p = 0..=3`.
fn oscillatory_moments(theta: f64) -> [C64; 4] {
    let mut m = [C64::new(0.0, 0.0); 4];
    if theta.abs() < 0.5 {
        let z = C64::new(0.0, -theta);
        for (p, mp) in m.iter_mut().enumerate() {
            let mut term = C64::new(1.0, 0.0);
            let mut sum = C64::new(0.0, 0.0);
            for k in 0..40 {
                sum += term / (p + k + 1) as f64;
                term = term * z / (k + 1) as f64;
                if term.norm() < 1e-18 {
                    break;
                }
            }
            *mp = sum;
        }
    } else {
        let e = C64::new(0.0, -theta).exp();
        let it = C64::new(0.0, theta);
        m[0] = (1.0 - e) / it;
        for p in 1..4 {
            m[p] = -e / it + m[p - 1] * (p as f64) / it;
        }
    }
    m
}

/// Coefficients of the Lagrange basis on `nodes` as polynomials in σ.
fn lagrange_coefficients(nodes: [f64; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for j in 0..4 {
            if j == i {
                continue;
            }
            let mut next = vec![0.0; poly.len() + 1];
            for (d, c) in poly.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * nodes[j];
            }
            poly = next;
            denom *= nodes[i] - nodes[j];
        }
        for d in 0..4 {
            out[i][d] = poly[d] / denom;
        }
    }
    out
}

/// Filon weights for `∫_{t_k}^{t_k+h} e^{−iω(t'−t_k)} g(t') dt'` against a
/// cubic through the samples at offsets `nodes` (in units of `h`).
fn filon_weights(omega: f64, h: f64, nodes: [f64; 4]) -> [C64; 4] {
    let m = oscillatory_moments(omega * h);
    let a = lagrange_coefficients(nodes);
    let mut w = [C64::new(0.0, 0.0); 4];
    for i in 0..4 {
        for p in 0..4 {
            w[i] += m[p] * (a[i][p] * h);
        }
    }
    w
}

/// `C(t_n) = ∫_0^{t_n} e^{−iωt'} g(t') dt'` on a uniform grid whose node `n0`
/// sits at `t = 0`. Cells on either side of `t = 0` only use samples from
/// their own side, so a jump of `g` at `t = 0` is not smeared.
fn cumulative_filon(g: &[C64], ts: &[f64], n0: usize, omega: f64) -> Vec<C64> {
    let nt = g.len();
    let h = ts[1] - ts[0];
    let mut c = vec![C64::new(0.0, 0.0); nt];
    let forward = cumulative_one_sided(&g[n0..], omega, h);
    c[n0..].copy_from_slice(&forward);
    let mut rev: Vec<C64> = g[..=n0].to_vec();
    rev.reverse();
    // ∫_0^{−s} e^{−iωt}g(t)dt = −∫_0^{s} e^{iωs'}g(−s')ds'
    let backward = cumulative_one_sided(&rev, -omega, h);
    for (j, v) in backward.into_iter().enumerate() {
        c[n0 - j] = -v;
    }
    c
}

/// `∫_0^{kh} e^{−iωs} g(s) ds` for samples `g[k]` at `s = kh`.
fn cumulative_one_sided(g: &[C64], omega: f64, h: f64) -> Vec<C64> {
    let n = g.len();
    let mut c = vec![C64::new(0.0, 0.0); n];
    if n < 2 {
        return c;
    }
    if n < 4 {
        // too short for a cubic: trapezoid against the exact exponential
        for k in 0..n - 1 {
            let m = oscillatory_moments(omega * h);
            let phase = C64::new(0.0, -omega * h * k as f64).exp();
            c[k + 1] = c[k] + phase * h * (g[k] * (m[0] - m[1]) + g[k + 1] * m[1]);
        }
        return c;
    }
    let interior = filon_weights(omega, h, [-1.0, 0.0, 1.0, 2.0]);
    let first = filon_weights(omega, h, [0.0, 1.0, 2.0, 3.0]);
    let last = filon_weights(omega, h, [-2.0, -1.0, 0.0, 1.0]);
    for k in 0..n - 1 {
        let (w, start) = if k == 0 {
            (&first, 0)
        } else if k + 2 >= n {
            (&last, k - 2)
        } else {
            (&interior, k - 1)
        };
        let phase = C64::new(0.0, -omega * h * k as f64).exp();
        c[k + 1] = c[k] + phase * (0..4).map(|i| w[i] * g[start + i]).sum::<C64>();
    }
    c
}

/// `∫_0^t W_R(0, f)(t − t') dt'`, i.e. the solution of `u_tt + 𝓛u = f_xx`
/// with zero data, in spatially-dual form on all time nodes.
pub fn duhamel(forcing: &SpectralField, sym: &PhaseSymbol) -> SpectralField {
    let f = forcing.to_spatial_dual();
    let g = f.grid;
    let ts = g.ts();
    let n0 = g.t0_index();
    let rows: Vec<Vec<C64>> = (0..g.nx)
        .into_par_iter()
        .map(|k| {
            let xi = g.xi(k);
            let m = velocity_multiplier(sym, xi);
            if m == 0.0 {
                return vec![C64::new(0.0, 0.0); g.nt];
            }
            let w = sym.phase(xi);
            let row: Vec<C64> = f.values.row(k).to_vec();
            let cp = cumulative_filon(&row, &ts, n0, w);
            let cm = cumulative_filon(&row, &ts, n0, -w);
            ts.iter()
                .enumerate()
                .map(|(n, &t)| {
                    let e = C64::new(0.0, w * t).exp();
                    (e * cp[n] - cm[n] / e) * m / C64::new(0.0, 2.0)
                })
                .collect()
        })
        .collect();
    let mut values = Array2::zeros((g.nx, g.nt));
    for (k, row) in rows.into_iter().enumerate() {
        for (n, v) in row.into_iter().enumerate() {
            values[[k, n]] = v;
        }
    }
    SpectralField {
        grid: g,
        repr: Representation::SpatialDual,
        values,
    }
}

/// Spatial derivative traces at `x = 0` over all grid times.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub ts: Vec<f64>,
    pub orders: Vec<u32>,
    pub values: Vec<Vec<f64>>,
    /// Orders whose outer spectral band holds more than 1% of the energy.
    pub aliasing: Vec<u32>,
}

/// `∂_x^j u(0,t) = (2L)^{−1} Σ_k (iξ_k)^j û(ξ_k,t)`.
pub fn traces_at_zero(u: &SpectralField, orders: &[u32]) -> Result<Traces> {
    if let Some(&j) = orders.iter().find(|&&j| j > 5) {
        return Err(Error::InvalidConfig(format!("trace order {j} outside 0..=5")));
    }
    let f = u.to_spatial_dual();
    let g = f.grid;
    let inv = 1.0 / (2.0 * g.x_extent);
    let mut values = Vec::new();
    let mut aliasing = Vec::new();
    for &j in orders {
        let mut series = vec![0.0; g.nt];
        let mut total = 0.0;
        let mut top = 0.0;
        for k in 0..g.nx {
            let xi = g.xi(k);
            let mult = C64::new(0.0, xi).powu(j) * inv;
            let band = crate::grid::signed_bin(k, g.nx).unsigned_abs() as usize * 16 >= 7 * g.nx;
            for (n, s) in series.iter_mut().enumerate() {
                let v = mult * f.values[[k, n]];
                *s += v.re;
                let e = v.norm_sqr();
                total += e;
                if band {
                    top += e;
                }
            }
        }
        if total > 0.0 && top > 0.01 * total {
            aliasing.push(j);
        }
        values.push(series);
    }
    Ok(Traces {
        ts: g.ts(),
        orders: orders.to_vec(),
        values,
        aliasing,
    })
}

/// `(u, u_xx, u_xxxx)` at `x = 0`.
pub fn trace_triple(u: &SpectralField) -> Result<Traces> {
    traces_at_zero(u, &[0, 2, 4])
}

impl Traces {
    /// The trace of one order on `0 ≤ t < t_stop`, multiplied by `weight(t)`
    /// and wrapped as a sampled series.
    pub fn to_series<W: Fn(f64) -> f64>(&self, order: u32, t_stop: f64, weight: W) -> Option<Profile> {
        let idx = self.orders.iter().position(|&o| o == order)?;
        let dt = self.ts[1] - self.ts[0];
        let start = self.ts.iter().position(|&t| t >= -1e-12 * dt)?;
        let values: Vec<f64> = self.ts[start..]
            .iter()
            .zip(&self.values[idx][start..])
            .take_while(|(t, _)| **t < t_stop)
            .map(|(&t, &v)| v * weight(t))
            .collect();
        Some(Profile::Sampled {
            t0: self.ts[start],
            dt,
            values,
        })
    }
}
