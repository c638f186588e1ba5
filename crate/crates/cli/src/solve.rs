//! `solve` and `linear`.

use crate::config::RunConfig;
use crate::output::{io_failure, write_failure, OutDir};
use crate::Failure;
use serde_json::json;
use sobe_core::io::{write_field_binary, write_series_csv};
use sobe_core::series::Profile;
use sobe_core::solver::{interior_residual, rescale_data, solve_full, GammaMap, ScalingParams};
use sobe_core::{PhaseSymbol, Representation, SpaceTimeGrid, SpectralField};
use std::io::Write;

/// Interior window of the residual check, in the coordinates of the solved
/// problem: a few cells off the boundary and inside the cutoff plateau.
fn residual_window(cfg: &RunConfig) -> ((f64, f64), (f64, f64)) {
    let g = cfg.solver.grid;
    let inner = cfg.solver.cutoff.inner;
    ((0.5, 5.0f64.min(0.25 * g.x_extent)), (0.1 * inner, 0.9 * inner))
}

/// Relative (or, for vanishing data, absolute) L² errors of the traces
/// `∂_x^{0,2,4}` against `h` on the middle half of the cutoff plateau.
fn trace_report(traces: &[(Vec<f64>, Vec<f64>)], h: &[Profile; 3], inner: f64) -> serde_json::Value {
    let rows: Vec<_> = (0..3)
        .map(|c| {
            let (ts, vals) = &traces[c];
            let (mut e, mut n) = (0.0, 0.0);
            let mut count = 0usize;
            for (t, v) in ts.iter().zip(vals) {
                if (0.25 * inner..=0.75 * inner).contains(t) {
                    let want = h[c].eval(*t);
                    e += (v - want).powi(2);
                    n += want * want;
                    count += 1;
                }
            }
            let rms = (e / count.max(1) as f64).sqrt();
            json!({
                "channel": c + 1,
                "order": 2 * c,
                "abs_rms": rms,
                "rel_l2": if n > 0.0 { Some((e / n).sqrt()) } else { None },
            })
        })
        .collect();
    json!(rows)
}

/// Quarter-plane samples `x ≥ 0`, `0 ≤ t ≤ t_max` of a physical field as a
/// CSV table with coordinates mapped by `coords` and values scaled by `scale`.
fn write_quarter_csv(
    out: &OutDir,
    name: &str,
    f: &SpectralField,
    t_max: f64,
    coords: impl Fn(f64, f64) -> (f64, f64),
    scale: f64,
) -> Result<(), Failure> {
    let g: SpaceTimeGrid = f.grid;
    let path = out.path(name);
    let mut w = csv::Writer::from_writer(out.create(name)?);
    w.write_record(["x", "t", "u"]).map_err(|e| io_failure(&path, e))?;
    for i in g.x0_index()..g.nx {
        for n in g.t0_index()..g.nt {
            if g.t(n) > t_max {
                break;
            }
            let (x, t) = coords(g.x(i), g.t(n));
            w.serialize((x, t, scale * f.values[[i, n]].re))
                .map_err(|e| io_failure(&path, e))?;
        }
    }
    w.flush().map_err(|e| io_failure(&path, e))
}

pub fn solve(cfg: &RunConfig, out: &OutDir) -> Result<(), Failure> {
    let d = cfg.problem()?;
    let sol = solve_full(&d, &cfg.solver)?;
    let rep = &sol.report;
    let lambda = sol.lambda;
    let scaled = rescale_data(&d, &ScalingParams::new(lambda)?, &cfg.solver.grid)?;
    let inner = cfg.solver.cutoff.inner;

    let traces = (0..=5u32).map(|j| rep.boundary_trace(j)).collect::<sobe_core::Result<Vec<_>>>()?;
    let even: Vec<_> = [0, 2, 4].iter().map(|&j| traces[j].clone()).collect();
    let reproduction = trace_report(&even, &scaled.boundary.h, inner);
    let (xr, tr) = residual_window(cfg);
    let (res, scale) = rep.interior_residual(xr, tr)?;

    let l3 = lambda.powi(3);
    write_quarter_csv(out, "solution.csv", &rep.solution, inner, |x, t| (x / lambda, t / l3), lambda.powi(4))?;
    let bin = out.path("solution.bin");
    write_field_binary(&rep.solution, out.create("solution.bin")?).map_err(write_failure(&bin))?;
    let ts: Vec<f64> = traces[0].0.iter().map(|t| t / l3).collect();
    let cols: Vec<Vec<f64>> = traces
        .iter()
        .enumerate()
        .map(|(j, (_, v))| v.iter().map(|x| x * lambda.powi(4 + j as i32)).collect())
        .collect();
    let names = ["u", "u_x", "u_xx", "u_xxx", "u_xxxx", "u_xxxxx"];
    let columns: Vec<(&str, &[f64])> = names.iter().zip(&cols).map(|(n, c)| (*n, c.as_slice())).collect();
    let tpath = out.path("traces.csv");
    write_series_csv(&ts, &columns, out.create("traces.csv")?).map_err(write_failure(&tpath))?;

    out.manifest(
        "solve",
        json!({
            "lambda_chosen": lambda,
            "alpha": rep.map.sym.alpha(),
            "iterations": rep.iterations,
            "contraction_ratios": rep.contraction_ratios,
            "increments": rep.increments,
            "residuals": {
                "fixed_point": rep.residual,
                "fixed_point_tolerance": 10.0 * cfg.solver.picard.rel_tol,
                "interior": res,
                "interior_scale": scale,
                "interior_relative": if scale > 0.0 { res / scale } else { 0.0 },
                "interior_window": { "x": [xr.0, xr.1], "t": [tr.0, tr.1] },
                "boundary_reproduction": reproduction,
            },
            "norms": { "Hs_slice_sup": rep.hs_slice_sup, "composite": rep.composite_norm },
            "original_horizon": sol.original_horizon(),
            "warnings": rep.map.warnings,
            "solution_dump": "rescaled field; u(x,t) = lambda^4 u_lambda(lambda x, lambda^3 t)",
        }),
    )
}

pub fn linear(cfg: &RunConfig, out: &OutDir) -> Result<(), Failure> {
    let d = cfg.problem()?;
    let sym = PhaseSymbol::new(1.0, cfg.solver.beta)?;
    let g = cfg.solver.grid;
    let map = GammaMap::new(&d, &sym, &cfg.solver)?;
    let eval = map.apply(&SpectralField::zeros(g, Representation::Physical))?;
    let inner = cfg.solver.cutoff.inner;

    let even = [0u32, 2, 4]
        .iter()
        .map(|&j| map.boundary_trace(&eval, j))
        .collect::<sobe_core::Result<Vec<_>>>()?;
    let reproduction = trace_report(&even, &d.boundary.h, inner);
    let utt = map.second_time_derivative(&eval)?;
    let (xr, tr) = residual_window(cfg);
    let (res, scale) = interior_residual(&eval.field, &utt, &sym, 0.0, xr, tr)?;

    write_quarter_csv(out, "linear.csv", &eval.field, inner, |x, t| (x, t), 1.0)?;
    let p = map.free_traces();
    let n0 = g.t0_index();
    let keep: Vec<usize> = (n0..g.nt).filter(|&n| g.t(n) <= cfg.solver.cutoff.outer).collect();
    let ts: Vec<f64> = keep.iter().map(|&n| p.ts[n]).collect();
    let names: Vec<String> = p.orders.iter().map(|j| format!("p{j}")).collect();
    let cols: Vec<Vec<f64>> = p.values.iter().map(|v| keep.iter().map(|&n| v[n]).collect()).collect();
    let columns: Vec<(&str, &[f64])> = names.iter().zip(&cols).map(|(n, c)| (n.as_str(), c.as_slice())).collect();
    let ppath = out.path("p_traces.csv");
    write_series_csv(&ts, &columns, out.create("p_traces.csv")?).map_err(write_failure(&ppath))?;
    let rpath = out.path("boundary_reproduction.csv");
    let mut w = out.create("boundary_reproduction.csv")?;
    writeln!(w, "channel,order,abs_rms,rel_l2").map_err(|e| io_failure(&rpath, e))?;
    for row in reproduction.as_array().expect("rows") {
        let rel = row["rel_l2"].as_f64().map_or(String::new(), |v| v.to_string());
        writeln!(w, "{},{},{},{}", row["channel"], row["order"], row["abs_rms"], rel).map_err(|e| io_failure(&rpath, e))?;
    }
    w.flush().map_err(|e| io_failure(&rpath, e))?;

    out.manifest(
        "linear",
        json!({
            "alpha": sym.alpha(),
            "residuals": {
                "interior": res,
                "interior_scale": scale,
                "interior_relative": if scale > 0.0 { res / scale } else { 0.0 },
                "interior_window": { "x": [xr.0, xr.1], "t": [tr.0, tr.1] },
                "boundary_reproduction": reproduction,
            },
            "warnings": map.warnings,
        }),
    )
}
