mod common;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sobe_core::boundary::BoundaryTriple;
use sobe_core::series::Profile;
use sobe_core::solver::*;
use sobe_core::symbols::PhaseSymbol;
use sobe_core::{Error, SpaceTimeGrid};

#[test]
fn zero_data_solve_full_picks_lambda_one() {
    let cfg = config(20.0, 128, 64);
    let sol = solve_full(&ProblemData::zero(-0.7), &cfg).unwrap();
    assert_eq!(sol.lambda, 1.0);
    assert_eq!(sol.report.iterations, 1);
    assert!(sol.report.solution.max_abs() == 0.0);
}

#[test]
fn small_data_contract_and_match_the_oracle() {
    let cfg = config(40.0, 1024, 512);
    let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
    let unit = Profile::GaussianTruncated { center: 8.0, width: 1.2, amplitude: 1.0 };
    let amp = 1e-3 / hs_proxy(&unit, &cfg.grid, cfg.s);
    let phi = Profile::GaussianTruncated { center: 8.0, width: 1.2, amplitude: amp };
    let rep = picard_solve(&initial_only(phi.clone()), &sym, &cfg).unwrap();
    assert!(rep.contraction_ratios.iter().all(|&r| r < 1.0));
    assert!(rep.residual <= 10.0 * cfg.picard.rel_tol, "{}", rep.residual);
    let d = oracle_distance(&rep, &sym, &phi);
    assert!(d <= 1e-3, "oracle distance {d:e}");
}

#[test]
fn moderate_data_match_the_oracle() {
    let cfg = config(40.0, 1024, 512);
    let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
    let phi = Profile::GaussianTruncated { center: 8.0, width: 1.2, amplitude: 0.2 };
    let rep = picard_solve(&initial_only(phi.clone()), &sym, &cfg).unwrap();
    assert!(rep.map.warnings.is_empty());
    let d = oracle_distance(&rep, &sym, &phi);
    assert!(d <= 1e-3, "oracle distance {d:e}");
}

#[test]
fn interior_residual_is_small() {
    let cfg = config(40.0, 2048, 512);
    let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
    let phi = Profile::GaussianTruncated { center: 8.0, width: 1.2, amplitude: 0.2 };
    let rep = picard_solve(&initial_only(phi), &sym, &cfg).unwrap();
    let (res, scale) = solution_residual(&rep);
    assert!(res <= 1e-3 * scale, "{res:e} vs {scale:e}");
}

#[test]
fn boundary_data_are_reproduced() {
    let cfg = config(40.0, 1024, 512);
    let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
    let h = [
        Profile::bump(0.5, 0.3, 0.05),
        Profile::bump(0.5, 0.3, -0.1),
        Profile::bump(0.45, 0.3, 0.2),
    ];
    let d = ProblemData {
        phi: Profile::GaussianTruncated { center: 8.0, width: 1.2, amplitude: 0.1 },
        psi: Profile::Zero,
        boundary: BoundaryTriple { h: h.clone(), s: -0.7 },
    };
    let rep = picard_solve(&d, &sym, &cfg).unwrap();
    for (c, e) in trace_errors(&rep, &h).into_iter().enumerate() {
        assert!(e <= 5e-3, "channel {c}: {e:e}");
    }
}

#[test]
fn large_data_do_not_contract() {
    let cfg = config(40.0, 512, 256);
    let sym = PhaseSymbol::new(1.0, 1.0).unwrap();
    let phi = Profile::GaussianTruncated { center: 8.0, width: 1.2, amplitude: 50.0 };
    match picard_solve(&initial_only(phi), &sym, &cfg) {
        Err(Error::NoContraction { ratios, .. }) => assert!(ratios.iter().rev().take(3).all(|&r| r >= 1.0)),
        other => panic!("expected no contraction, got {:?}", other.map(|r| r.iterations)),
    }
}

#[test]
fn ladder_moves_to_larger_lambda() {
    let cfg = config(40.0, 512, 256);
    let phi = Profile::GaussianTruncated { center: 2.0, width: 0.3, amplitude: 40.0 };
    let sol = solve_full(&initial_only(phi), &cfg).unwrap();
    assert!(sol.lambda > 1.0);
}

#[test]
fn tiny_data_keep_lambda_one() {
    let cfg = config(40.0, 512, 256);
    let phi = Profile::GaussianTruncated { center: 8.0, width: 1.2, amplitude: 1e-4 };
    assert_eq!(solve_full(&initial_only(phi), &cfg).unwrap().lambda, 1.0);
}

#[test]
fn scaling_covariance_on_random_data() {
    let cfg = config(48.0, 1536, 512);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let phi = Profile::GaussianTruncated {
            center: rng.gen_range(2.8..3.4),
            width: rng.gen_range(0.6..0.7),
            amplitude: rng.gen_range(0.1..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
        };
        let m = scaling_mismatch(&initial_only(phi.clone()), &cfg);
        assert!(m <= 1e-3, "{phi:?}: {m:e}");
    }
}

#[test]
fn rescaling_l2_factor() {
    let grid = SpaceTimeGrid::new(60.0, 4096, 4.0, 8).unwrap();
    let phi = Profile::GaussianTruncated { center: 5.0, width: 1.0, amplitude: 1.0 };
    let d = initial_only(phi.clone());
    let r = rescale_data(&d, &ScalingParams::new(2.0).unwrap(), &grid).unwrap();
    let l2 = |p: &Profile| sobe_core::quadrature::integrate(|x| p.eval(x).powi(2), -60.0, 60.0, 20, 200).sqrt();
    assert!((l2(&r.phi) / l2(&phi) - 2f64.powf(-3.5)).abs() < 1e-10);
    match rescale_data(&d, &ScalingParams::new(64.0).unwrap(), &grid) {
        Err(Error::ResampleOutOfWindow(_)) => {}
        other => panic!("{other:?}"),
    }
}
