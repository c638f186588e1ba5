//! Gauss–Legendre rules and a bisecting adaptive integrator.

use crate::error::{Error, Result};
use gauss_quad::GaussLegendre;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on `[-1, 1]`, cached per order.
pub fn legendre(order: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    map.entry(order.max(2))
        .or_insert_with(|| {
            let rule = GaussLegendre::new(order.max(2)).expect("order >= 2");
            let mut pairs = rule.into_node_weight_pairs();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            Arc::new(pairs)
        })
        .clone()
}

/// Composite rule on `[a, b]`: `panels` equal panels of `order` nodes each.
pub fn composite(a: f64, b: f64, order: usize, panels: usize) -> Vec<(f64, f64)> {
    let rule = legendre(order);
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let lo = a + h * p as f64;
        for &(x, w) in rule.iter() {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, order: usize, panels: usize) -> f64 {
    composite(a, b, order, panels)
        .iter()
        .map(|&(x, w)| w * f(x))
        .sum()
}

/// Adaptive bisection with a 20-point rule compared against its two halves.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> Result<f64> {
        let m = 0.5 * (a + b);
        let left = integrate(f, a, m, 20, 1);
        let right = integrate(f, m, b, 20, 1);
        let err = (left + right - whole).abs();
        if err <= tol || (b - a).abs() < 1e-12 * (a.abs() + b.abs()).max(1.0) {
            return Ok(left + right);
        }
        if depth >= 48 {
            return Err(Error::NonconvergentQuadrature(format!(
                "adaptive bisection on [{a}, {b}] stalled with error {err:e}"
            )));
        }
        Ok(rec(f, a, m, left, 0.5 * tol, depth + 1)? + rec(f, m, b, right, 0.5 * tol, depth + 1)?)
    }
    let whole = integrate(f, a, b, 20, 1);
    rec(f, a, b, whole, tol, 0)
}

/// `∫_ℝ f` for an integrand with power-law tails `|f(x)| ≲ C|x|^{−p}`, `p > 1`.
///
/// The line is split at `±R` with `R` growing geometrically until the
/// analytic tail bound `|f(R)|·R/(p−1)` drops below `tol`.
pub fn integrate_line<F: Fn(f64) -> f64>(f: &F, center: f64, decay: f64, tol: f64) -> Result<f64> {
    if !(decay > 1.0) {
        return Err(Error::NonconvergentQuadrature(format!(
            "tail exponent {decay} does not give an integrable tail"
        )));
    }
    let mut total = adaptive(f, center - 1.0, center + 1.0, 0.1 * tol)?;
    let mut r = 1.0;
    for _ in 0..200 {
        let next = 2.0 * r;
        total += adaptive(f, center + r, center + next, 0.1 * tol)?;
        total += adaptive(f, center - next, center - r, 0.1 * tol)?;
        r = next;
        let tail = (f(center + r).abs() + f(center - r).abs()) * r / (decay - 1.0);
        if tail <= tol * total.abs().max(1e-300) {
            return Ok(total);
        }
    }
    Err(Error::NonconvergentQuadrature(
        "power-law tail did not fall below tolerance".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let v = integrate(|x| x.powi(7) + 3.0 * x * x, -1.0, 2.0, 4, 1);
        let exact = (2f64.powi(8) - 1.0) / 8.0 + (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let v = adaptive(&f, -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * (1.0 / 1e-4f64.sqrt()) * (1.0 / 1e-4f64.sqrt()).atan();
        assert!((v - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn line_integral_of_lorentzian() {
        let v = integrate_line(&|x: f64| 1.0 / (1.0 + x * x), 0.0, 2.0, 1e-10).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-8);
    }
}
