mod common;

use common::*;
use proptest::prelude::*;
use sobe_core::boundary::*;
use sobe_core::series::Profile;
use sobe_core::symbols::PhaseSymbol;

fn symbols() -> [PhaseSymbol; 3] {
    [(1.0, 1.0), (1.0, -1.0), (0.25, 1.0)].map(|(a, b)| PhaseSymbol::new(a, b).unwrap())
}

#[test]
fn each_channel_is_reproduced() {
    for sym in symbols() {
        for ch in 0..3 {
            let bt = single_channel(ch, Profile::bump(0.5, 0.3, 1.0));
            let e = boundary_reproduction(&bt, &sym, ch);
            assert!(e <= 1e-3, "alpha={} ch={ch}: {e:e}", sym.alpha());
        }
    }
}

#[test]
fn interior_equation_holds() {
    let sym = PhaseSymbol::new(1.0, -1.0).unwrap();
    for ch in 0..3 {
        let (res, scale) = boundary_residual(&single_channel(ch, Profile::bump(0.5, 0.3, 1.0)), &sym);
        assert!(res <= 1e-4 * scale, "ch={ch}: {res:e} vs {scale:e}");
    }
}

#[test]
fn quadrature_refinement_converges() {
    let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
    let bt = BoundaryTriple::new(
        Profile::bump(0.5, 0.3, 1.0),
        Profile::bump(0.4, 0.25, -0.5),
        Profile::bump(0.6, 0.3, 0.2),
        -0.7,
    );
    let d = boundary_self_convergence(&bt, &sym);
    assert!(d <= 1e-4, "{d:e}");
}

#[test]
fn zero_data_give_exact_zero() {
    let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
    let cfg = BoundaryConfig::default();
    let w = EvalWindow::uniform(0.0, 2.0, 5, 0.0, 1.0, 5).unwrap();
    let u = BoundaryPlan::new(&BoundaryTriple::zero(-0.7), &sym, &cfg, &w)
        .unwrap()
        .total(&w, 0, 0, &cfg)
        .unwrap();
    assert!(u.iter().all(|v| *v == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn operator_is_linear(
        a in -2.0f64..2.0, b in -2.0f64..2.0,
        c1 in 0.4f64..0.6, c2 in 0.4f64..0.6,
    ) {
        let sym = PhaseSymbol::new(1.0, -1.0).unwrap();
        let x = single_channel(0, Profile::bump(c1, 0.3, 1.0));
        let y = BoundaryTriple::new(Profile::Zero, Profile::bump(c2, 0.3, 1.0), Profile::bump(c1, 0.25, 0.5), -0.7);
        prop_assume!(a.abs() + b.abs() > 0.1);
        prop_assert!(boundary_linearity(&x, &y, a, b, &sym) <= 1e-10);
    }
}
