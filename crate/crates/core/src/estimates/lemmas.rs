//! Elementary integral bounds: a product of two Japanese brackets and the
//! reciprocal bracket of a quadratic or cubic polynomial.

use super::RatioReport;
use crate::error::{Error, Result};
use crate::norms::japanese;
use crate::quadrature::integrate_line;

const TOL: f64 = 1e-11;

/// `∫ dx / (⟨x−c₁⟩^{ρ₁} ⟨x−c₂⟩^{ρ₂})`.
pub fn int_tau_integral(rho1: f64, rho2: f64, c1: f64, c2: f64) -> Result<f64> {
    if !(rho1 > 1.0 && rho2 >= 0.0 && rho2 <= rho1) {
        return Err(Error::InvalidExponent(format!(
            "need rho1 > 1 and 0 <= rho2 <= rho1, got ({rho1}, {rho2})"
        )));
    }
    let f = |x: f64| 1.0 / (japanese(x - c1).powf(rho1) * japanese(x - c2).powf(rho2));
    // Split at the midpoint so both peaks sit near the first panels.
    integrate_line(&f, 0.5 * (c1 + c2), rho1 + rho2, TOL)
}

/// Sweeps `c₂` over `c2s` and reports `I·⟨c₁−c₂⟩^{ρ₂}` against `⟨c₁−c₂⟩`.
pub fn check_lemma_int_tau(rho1: f64, rho2: f64, c1: f64, c2s: &[f64]) -> Result<RatioReport> {
    let mut pts: Vec<(f64, f64)> = c2s
        .iter()
        .map(|&c2| {
            let gap = japanese(c1 - c2);
            Ok((gap, int_tau_integral(rho1, rho2, c1, c2)? * gap.powf(rho2)))
        })
        .collect::<Result<_>>()?;
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    RatioReport::new(
        "lemma_int_tau",
        vec![("rho1".into(), rho1), ("rho2".into(), rho2), ("c1".into(), c1)],
        pts.iter().map(|p| p.0).collect(),
        pts.iter().map(|p| p.1).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolyKind {
    /// `∫⟨c₂x²+c₁x+c₀⟩^{−ρ} ≤ C|c₂|^{−1/2}`, `ρ > 1/2`.
    QuadHalf,
    /// `∫⟨c₃x³+c₂x²+c₁x+c₀⟩^{−ρ} ≤ C|c₃|^{−1/3}`, `ρ > 1/3`.
    CubicThird,
    /// `∫⟨c₂x²+c₁x+c₀⟩^{−ρ} ≤ C|c₂|^{−1/2}⟨c₀−c₁²/4c₂⟩^{−1/2}`, `ρ > 1`.
    QuadProduct,
}

impl PolyKind {
    fn degree(self) -> usize {
        match self {
            PolyKind::CubicThird => 3,
            _ => 2,
        }
    }

    pub fn min_rho(self) -> f64 {
        match self {
            PolyKind::QuadHalf => 0.5,
            PolyKind::CubicThird => 1.0 / 3.0,
            PolyKind::QuadProduct => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PolyKind::QuadHalf => "quad_half",
            PolyKind::CubicThird => "cubic_third",
            PolyKind::QuadProduct => "quad_product",
        }
    }

    /// The right-hand side without its constant, for coefficients `[c₀, c₁, …]`.
    fn bound(self, c: &[f64]) -> f64 {
        match self {
            PolyKind::QuadHalf => c[2].abs().powf(-0.5),
            PolyKind::CubicThird => c[3].abs().powf(-1.0 / 3.0),
            PolyKind::QuadProduct => {
                c[2].abs().powf(-0.5) * japanese(c[0] - c[1] * c[1] / (4.0 * c[2])).powf(-0.5)
            }
        }
    }
}

fn check_poly(kind: PolyKind, coefficients: &[f64], rho: f64) -> Result<()> {
    let d = kind.degree();
    if coefficients.len() != d + 1 {
        return Err(Error::InvalidConfig(format!(
            "{} needs {} coefficients, got {}",
            kind.name(),
            d + 1,
            coefficients.len()
        )));
    }
    if coefficients[d] == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    if !(rho > kind.min_rho()) {
        return Err(Error::InvalidExponent(format!(
            "{} needs rho > {}, got {rho}",
            kind.name(),
            kind.min_rho()
        )));
    }
    Ok(())
}

/// `∫ dx / ⟨P(x)⟩^ρ` with `P(x) = Σ cᵢ xⁱ`.
pub fn poly_integral(kind: PolyKind, coefficients: &[f64], rho: f64) -> Result<f64> {
    check_poly(kind, coefficients, rho)?;
    let c = coefficients.to_vec();
    let d = kind.degree();
    let p = move |x: f64| c.iter().rev().fold(0.0, |acc, ci| acc * x + ci);
    let f = |x: f64| japanese(p(x)).powf(-rho);
    // Centre on the vertex or the inflection point.
    let center = -coefficients[d - 1] / (d as f64 * coefficients[d]);
    integrate_line(&f, center, d as f64 * rho, TOL)
}

/// The lemma's ratio along its substitution scaling `x → x/k^{1/d}`, which
/// multiplies the leading coefficient by `k ∈ {1, 4, 16, 64}`.
pub fn check_lemma_poly(kind: PolyKind, coefficients: &[f64], rho: f64) -> Result<RatioReport> {
    check_poly(kind, coefficients, rho)?;
    let d = kind.degree();
    let mut levels = Vec::new();
    let mut ratios = Vec::new();
    for k in [1.0f64, 4.0, 16.0, 64.0] {
        let c: Vec<f64> = coefficients
            .iter()
            .enumerate()
            .map(|(i, ci)| ci * k.powf(i as f64 / d as f64))
            .collect();
        levels.push(c[d].abs());
        ratios.push(poly_integral(kind, &c, rho)? / kind.bound(&c));
    }
    let mut params = vec![("rho".to_string(), rho)];
    params.extend(coefficients.iter().enumerate().map(|(i, c)| (format!("c{i}"), *c)));
    RatioReport::new(kind.name(), params, levels, ratios)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn coincident_centres_give_arctan_integral() {
        let v = int_tau_integral(2.0, 0.0, 3.0, 3.0).unwrap();
        assert!((v - PI).abs() < 1e-9);
    }

    #[test]
    fn exponents_checked() {
        assert!(matches!(int_tau_integral(1.0, 0.0, 0.0, 0.0), Err(Error::InvalidExponent(_))));
        assert!(matches!(
            poly_integral(PolyKind::QuadHalf, &[0.0, 0.0, 0.0], 1.0),
            Err(Error::ZeroLeadingCoefficient)
        ));
        assert!(matches!(
            poly_integral(PolyKind::QuadProduct, &[0.0, 0.0, 1.0], 0.9),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn quadratic_halves_when_leading_coefficient_quadruples() {
        let a = poly_integral(PolyKind::QuadHalf, &[0.0, 0.0, 1.0], 1.0).unwrap();
        let b = poly_integral(PolyKind::QuadHalf, &[0.0, 0.0, 4.0], 1.0).unwrap();
        assert!((b / a - 0.5).abs() < 1e-8);
    }
}
