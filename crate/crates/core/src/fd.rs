//! Finite-difference weights on arbitrary stencils (Fornberg's recursion).

/// Weights `c[k][i]` such that `f^{(k)}(z) ≈ Σ_i c[k][i] f(x_i)` for
/// `k = 0..=m`.
pub fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// `order`-th derivative at index `i` of uniformly spaced samples, using a
/// `width`-point stencil centred on `i` where possible and shifted inward at
/// the ends.
pub fn derivative(values: &[f64], spacing: f64, i: usize, order: usize, width: usize) -> f64 {
    let n = values.len();
    let width = width.min(n);
    let half = width / 2;
    let start = i.saturating_sub(half).min(n - width);
    let xs: Vec<f64> = (start..start + width).map(|j| j as f64 - i as f64).collect();
    let w = fornberg(0.0, &xs, order);
    let sum: f64 = w[order]
        .iter()
        .zip(&values[start..start + width])
        .map(|(c, v)| c * v)
        .sum();
    sum / spacing.powi(order as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_second_difference() {
        let w = fornberg(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
        assert!((w[1][0] + 0.5).abs() < 1e-15 && (w[1][2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn one_sided_sixth_derivative_of_polynomial() {
        let h = 0.1;
        let v: Vec<f64> = (0..20).map(|j| (j as f64 * h).powi(6)).collect();
        let d = derivative(&v, h, 0, 6, 12);
        assert!((d - 720.0).abs() < 1e-5, "{d}");
    }
}
