use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sobe_core::propagator::*;
use sobe_core::{PhaseSymbol, Representation, SpaceTimeGrid, SpectralField};
use std::f64::consts::PI;

fn gauss(c: f64, w: f64) -> impl Fn(f64) -> f64 {
    move |x| (-((x - c) / w).powi(2)).exp()
}

#[test]
fn initial_data_are_reproduced() {
    let g = SpaceTimeGrid::new(20.0, 512, 2.0, 64).unwrap();
    let sym = PhaseSymbol::new(1.0, -1.0).unwrap();
    let data = InitialPair::from_fns(g, gauss(1.0, 1.5), gauss(-2.0, 1.0));
    let n0 = g.t0_index();
    let u = free_evolution(&data, &sym).to_physical();
    for i in 0..g.nx {
        assert!((u.values[[i, n0]].re - data.phi[i]).abs() < 1e-12);
    }
    let v = free_evolution_derivative(&data, &sym, 1);
    let psi: Vec<C64> = data.psi.iter().map(|&r| C64::new(r, 0.0)).collect();
    let spec = sobe_core::field::spectrum_1d(&psi, g.dx());
    let scale = spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for k in 0..g.nx {
        let xi = g.xi(k);
        assert!((v.values[[k, n0]] + spec[k] * xi * xi).norm() <= 1e-10 * scale);
    }
}

#[test]
fn mode_energy_is_conserved() {
    let g = SpaceTimeGrid::new(20.0, 256, 2.0, 128).unwrap();
    let sym = PhaseSymbol::new(0.5, 1.0).unwrap();
    let data = InitialPair::from_fns(g, gauss(0.5, 1.0), gauss(0.0, 2.0));
    for k in [1, 5, 17, 40, 100] {
        let e0 = mode_energy(&data, &sym, k, g.t0_index());
        for n in g.t0_index()..g.nt {
            let e = mode_energy(&data, &sym, k, n);
            assert!((e - e0).abs() <= 1e-8 * e0.max(1e-300), "k={k}");
        }
    }
}

#[test]
fn cosine_evolves_as_a_standing_wave() {
    let g = SpaceTimeGrid::new(4.0 * PI, 64, 2.0, 32).unwrap();
    let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
    let data = InitialPair::from_fns(g, f64::cos, |_| 0.0);
    let u = free_evolution(&data, &sym).to_physical();
    for (i, x) in g.xs().into_iter().enumerate() {
        for (n, t) in g.ts().into_iter().enumerate() {
            let want = (3f64.sqrt() * t).cos() * x.cos();
            assert!((u.values[[i, n]].re - want).abs() < 1e-10);
        }
    }
}

/// Fixed-step RK4 for `v'' = −φ²v − ξ²T(t)`, `v(0) = v'(0) = 0`.
fn mode_rk4(w: f64, xi: f64, forcing: &dyn Fn(f64) -> f64, t_end: f64, steps: usize) -> f64 {
    let rhs = |t: f64, y: [f64; 2]| [y[1], -w * w * y[0] - xi * xi * forcing(t)];
    let h = t_end / steps as f64;
    let mut y = [0.0, 0.0];
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = rhs(t, y);
        let k2 = rhs(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = rhs(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y[0]
}

fn separable_duhamel(sym: &PhaseSymbol, mode: f64, temporal: &dyn Fn(f64) -> f64, nt: usize) -> (SpaceTimeGrid, SpectralField) {
    let g = SpaceTimeGrid::new(8.0 * PI, 64, 2.0, nt).unwrap();
    let f = SpectralField::from_real_fn(g, |x, t| (mode * x).cos() * temporal(t));
    (g, duhamel(&f, sym).to_physical())
}

#[test]
fn duhamel_matches_per_mode_rk() {
    let sym = PhaseSymbol::new(1.0, -1.0).unwrap();
    let temporal = |t: f64| (-(t - 0.6f64).powi(2) / 0.08).exp() * (3.0 * t).sin();
    for mode in [0.25, 1.0, 2.0] {
        let (g, u) = separable_duhamel(&sym, mode, &temporal, 4096);
        let i0 = g.x0_index();
        let w = sym.phase(mode);
        let mut err: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for n in (g.t0_index()..g.nt).step_by(64) {
            let t = g.t(n);
            let want = mode_rk4(w, mode, &temporal, t, 20000);
            err = err.max((u.values[[i0, n]].re - want).abs());
            scale = scale.max(want.abs());
        }
        assert!(err <= 1e-6 * scale, "mode {mode}: {err:e} vs {scale:e}");
    }
}

#[test]
fn constant_forcing_has_the_closed_form() {
    let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
    let mode = 0.75;
    let (g, u) = separable_duhamel(&sym, mode, &|_| 1.0, 256);
    let w = sym.phase(mode);
    for n in g.t0_index()..g.nt {
        let t = g.t(n);
        let want = -mode * mode * (1.0 - (w * t).cos()) / (w * w);
        assert!((u.values[[g.x0_index(), n]].re - want).abs() < 1e-8, "t={t}");
    }
}

#[test]
fn traces_reject_high_orders() {
    let g = SpaceTimeGrid::new(8.0, 32, 1.0, 8).unwrap();
    let u = SpectralField::zeros(g, Representation::Physical);
    assert!(traces_at_zero(&u, &[6]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn duhamel_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -1.0f64..1.0) {
        let g = SpaceTimeGrid::new(10.0, 64, 2.0, 64).unwrap();
        let sym = PhaseSymbol::new(1.0, -1.0).unwrap();
        let f1 = SpectralField::from_real_fn(g, |x, t| gauss(c, 1.0)(x) * gauss(0.5, 0.3)(t));
        let f2 = SpectralField::from_real_fn(g, |x, t| gauss(-c, 2.0)(x) * (2.0 * t).sin());
        let lhs = duhamel(&f1.scale(a).add(&f2.scale(b)).unwrap(), &sym);
        let rhs = duhamel(&f1, &sym).scale(a).add(&duhamel(&f2, &sym).scale(b)).unwrap();
        let scale = lhs.max_abs().max(1e-300);
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn free_evolution_is_time_reversible(c in -3.0f64..3.0, w in 0.8f64..2.0) {
        let g = SpaceTimeGrid::new(16.0, 128, 1.0, 16).unwrap();
        let sym = PhaseSymbol::new(0.7, 1.0).unwrap();
        let data = InitialPair::from_fns(g, gauss(c, w), |_| 0.0);
        let u = free_evolution(&data, &sym);
        let n0 = g.t0_index();
        for m in 1..n0 {
            for k in 0..g.nx {
                prop_assert!((u.values[[k, n0 + m]] - u.values[[k, n0 - m]]).norm() < 1e-12);
            }
        }
    }
}
