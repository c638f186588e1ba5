//! Discrete Sobolev, Bourgain-type and low-frequency `Λ_σ` norms.
//!
//! Dual sums carry the measure `dξ dτ/(2π)²` (or `dξ/2π` in one variable), so
//! every norm with trivial weights reduces to the discrete L² norm.

use crate::error::{Error, Result};
use crate::field::{spectrum_1d, Representation, SpectralField};
use crate::symbols::PhaseSymbol;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormVariant {
    SobolevLine,
    SobolevHalflineExtension,
    Bourgain,
    LambdaSigma,
    Composite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub s: f64,
    pub b: f64,
    pub sigma: f64,
    pub variant: NormVariant,
}

impl NormSpec {
    pub fn new(s: f64, b: f64, sigma: f64, variant: NormVariant) -> Result<Self> {
        let uses_sigma = matches!(variant, NormVariant::LambdaSigma | NormVariant::Composite);
        if uses_sigma && !(sigma > 0.5 && sigma < 1.0) {
            return Err(Error::InvalidExponent(format!(
                "sigma must lie in (1/2, 1), got {sigma}"
            )));
        }
        Ok(Self { s, b, sigma, variant })
    }

    pub fn composite(s: f64, sigma: f64) -> Result<Self> {
        Self::new(s, 0.5, sigma, NormVariant::Composite)
    }
}

/// Distance from the dispersion surface used in the modulation weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    /// `|τ| − φ_α(ξ)`.
    Exact,
    /// `|τ| − |ξ|³ − (αβ/2)|ξ|`.
    Cubic,
}

impl Modulation {
    pub fn eval(self, sym: &PhaseSymbol, xi: f64, tau: f64) -> f64 {
        match self {
            Modulation::Exact => tau.abs() - sym.phase(xi),
            Modulation::Cubic => {
                let a = xi.abs();
                tau.abs() - a * a * a - 0.5 * sym.alpha_beta() * a
            }
        }
    }
}

/// `(Σ_k ⟨ξ_k⟩^{2s} |f̂_k|² Δξ/2π)^{1/2}` for samples on a periodic line.
pub fn sobolev_norm_line(values: &[C64], spacing: f64, s: f64) -> f64 {
    let n = values.len();
    let spec = spectrum_1d(values, spacing);
    let dxi = 2.0 * PI / (n as f64 * spacing);
    let sum: f64 = spec
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let xi = crate::grid::signed_bin(k, n) as f64 * dxi;
            japanese(xi).powf(2.0 * s) * v.norm_sqr()
        })
        .sum();
    (sum * dxi / (2.0 * PI)).sqrt()
}

pub fn sobolev_norm_line_real(values: &[f64], spacing: f64, s: f64) -> f64 {
    let v: Vec<C64> = values.iter().map(|&r| C64::new(r, 0.0)).collect();
    sobolev_norm_line(&v, spacing, s)
}

/// Zero-extension proxy for the half-line quotient norm: samples on `x ≥ 0`
/// are padded with as many zeros on the left and measured on the line. This
/// is an upper bound for the quotient norm, exact for `|s| < 1/2`.
pub fn sobolev_norm_halfline(values: &[C64], spacing: f64, s: f64) -> f64 {
    let mut ext = vec![C64::new(0.0, 0.0); values.len()];
    ext.extend_from_slice(values);
    sobolev_norm_line(&ext, spacing, s)
}

fn weighted_dual_sum<W: Fn(f64, f64) -> f64>(f: &SpectralField, weight: W) -> Result<f64> {
    f.expect(Representation::Dual)?;
    let g = f.grid;
    let xis = g.xis();
    let taus = g.taus();
    let mut sum = 0.0;
    for (k, row) in f.values.outer_iter().enumerate() {
        let xi = xis[k];
        for (n, v) in row.iter().enumerate() {
            let w = weight(xi, taus[n]);
            if w != 0.0 {
                sum += w * w * v.norm_sqr();
            }
        }
    }
    Ok(sum * g.dxi() * g.dtau() / (4.0 * PI * PI))
}

/// `‖⟨ξ⟩^s ⟨|τ|−φ(ξ)⟩^b f̂‖` on a dual field.
pub fn bourgain_norm(f: &SpectralField, sym: &PhaseSymbol, spec: &NormSpec) -> Result<f64> {
    bourgain_norm_with(f, sym, spec.s, spec.b, Modulation::Exact)
}

pub fn bourgain_norm_with(
    f: &SpectralField,
    sym: &PhaseSymbol,
    s: f64,
    b: f64,
    modulation: Modulation,
) -> Result<f64> {
    Ok(weighted_dual_sum(f, |xi, tau| {
        japanese(xi).powf(s) * japanese(modulation.eval(sym, xi, tau)).powf(b)
    })?
    .sqrt())
}

/// `‖χ_{|ξ|≤1} ⟨τ⟩^σ f̂‖` on a dual field.
pub fn lambda_sigma_norm(f: &SpectralField, spec: &NormSpec) -> Result<f64> {
    Ok(weighted_dual_sum(f, |xi, tau| {
        if xi.abs() <= 1.0 {
            japanese(tau).powf(spec.sigma)
        } else {
            0.0
        }
    })?
    .sqrt())
}

pub fn composite_norm(f: &SpectralField, sym: &PhaseSymbol, spec: &NormSpec) -> Result<f64> {
    Ok(bourgain_norm(f, sym, spec)? + lambda_sigma_norm(f, spec)?)
}

/// `sup_t` of the zero-extension `H^s(ℝ⁺)` proxy over time slices with
/// `t ∈ [t_lo, t_hi]`, for a physical field.
pub fn halfline_slice_sup(f: &SpectralField, s: f64, t_lo: f64, t_hi: f64) -> Result<f64> {
    f.expect(Representation::Physical)?;
    let g = f.grid;
    let i0 = g.x0_index();
    let mut sup = 0.0_f64;
    for n in 0..g.nt {
        let t = g.t(n);
        if t < t_lo || t > t_hi {
            continue;
        }
        let col: Vec<C64> = (i0..g.nx).map(|i| f.values[[i, n]]).collect();
        sup = sup.max(sobolev_norm_halfline(&col, g.dx(), s));
    }
    Ok(sup)
}
