use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sobe_core::symbols::*;
use sobe_core::Error;

fn symbol() -> impl Strategy<Value = PhaseSymbol> {
    (0.01f64..=1.0, prop::bool::ANY)
        .prop_map(|(a, pos)| PhaseSymbol::new(a, if pos { 1.0 } else { -1.0 }).unwrap())
}

/// `ρ` with positive real part over several decades of modulus.
fn right_half_plane() -> impl Strategy<Value = C64> {
    (-2.0f64..3.0, -1.5f64..1.5).prop_map(|(lg, th)| C64::from_polar(10f64.powf(lg), th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn decaying_roots_solve_the_sextic(sym in symbol(), rho in right_half_plane()) {
        let rs = characteristic_roots(&sym, rho).unwrap();
        for g in rs.roots {
            prop_assert!(g.re < 0.0);
            prop_assert!(sym.characteristic_residual(g, rho) <= 1e-10);
        }
        prop_assert!(rs.vandermonde_defect() <= 1e-12);
    }

    #[test]
    fn cramer_coefficients_solve_the_boundary_system(
        sym in symbol(), rho in right_half_plane(),
        h in prop::array::uniform3((-1.0f64..1.0, -1.0f64..1.0)),
    ) {
        let rs = characteristic_roots(&sym, rho).unwrap();
        let h = h.map(|(a, b)| C64::new(a, b));
        let c = cramer_coefficients(&rs, &h).unwrap();
        let z = rs.z_roots();
        for (m, hm) in h.iter().enumerate() {
            let row: C64 = (0..3).map(|j| c[j] * z[j].powu(m as u32)).sum();
            let scale = c.iter().zip(z).map(|(cj, zj)| cj.norm() * zj.norm().powi(m as i32)).sum::<f64>();
            prop_assert!((row - hm).norm() <= 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn oscillatory_roots_are_limits_from_the_right(sym in symbol(), mu in 1.0f64..100.0) {
        let osc = oscillatory_roots(&sym, mu);
        prop_assert_eq!(osc.gamma_plus[0], C64::new(0.0, -mu));
        let w = sym.phase(mu);
        let eps = 1e-9 * w;
        let near = characteristic_roots(&sym, C64::new(eps, w)).unwrap();
        for g in osc.gamma_plus {
            let d = near.roots.iter().map(|r| (r - g).norm()).fold(f64::MAX, f64::min);
            prop_assert!(d <= 1e-6 * mu.max(1.0), "mu={} d={}", mu, d);
        }
    }

    #[test]
    fn inverse_phase_inverts(sym in symbol(), mu in 0.0f64..50.0) {
        let back = sym.inverse_phase(sym.phase(mu));
        prop_assert!((back - mu).abs() <= 1e-10 * mu.max(1.0));
    }

    #[test]
    fn phase_is_even_and_increasing(sym in symbol(), a in 0.0f64..20.0, b in 0.0f64..20.0) {
        prop_assert_eq!(sym.phase(a), sym.phase(-a));
        if a < b {
            prop_assert!(sym.phase(a) < sym.phase(b));
        }
    }
}

#[test]
fn quadratic_factor_at_unit_parameters() {
    let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
    let osc = oscillatory_roots(&sym, 1.0);
    let want = (1.0 + 3f64.sqrt()) / 2.0;
    assert!((osc.p * osc.p - want).abs() < 1e-12);
    assert!((osc.quadratic_root(&sym) - C64::new(1.0, 2f64.sqrt())).norm() < 1e-14);
}

#[test]
fn root_at_the_origin_is_rejected() {
    let sym = PhaseSymbol::new(1.0, -1.0).unwrap();
    assert!(matches!(
        characteristic_roots(&sym, C64::new(0.0, 0.0)),
        Err(Error::DegenerateRoots { .. })
    ));
}

#[test]
fn repeated_roots_make_the_system_degenerate() {
    let g = C64::new(-1.0, 0.5);
    let rs = RootSystem::from_roots(C64::new(1.0, 0.0), [g, g, C64::new(-2.0, 0.0)]);
    assert!(rs.is_degenerate());
    assert!(matches!(
        cramer_coefficients(&rs, &[C64::new(1.0, 0.0); 3]),
        Err(Error::DegenerateSystem { .. })
    ));
}
