#![allow(dead_code)]

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use sobe_core::boundary::{BoundaryConfig, BoundaryPlan, BoundaryTriple, EvalWindow};
use sobe_core::fd;
use sobe_core::norms::sobolev_norm_halfline;
use sobe_core::series::Profile;
use sobe_core::solver::*;
use sobe_core::symbols::PhaseSymbol;
use sobe_core::SpaceTimeGrid;

/// Sine-series integrating-factor RK4 for `u_tt + 𝓛u + (u²)_xx = 0` on
/// `[0, L]` with `u = u_xx = u_xxxx = 0` at both ends. The state lives on the
/// odd periodic extension over `[−L, L)` with `n` nodes. Returns snapshots of
/// the `x ≥ 0` half at `t = k·out_dt`, `k = 0..=n_out`. `coupling` scales the
/// nonlinear term (1 for the equation itself).
pub fn sine_oracle(
    sym: &PhaseSymbol,
    l: f64,
    n: usize,
    phi: impl Fn(f64) -> f64,
    out_dt: f64,
    n_out: usize,
    substeps: usize,
    coupling: f64,
) -> Vec<Vec<f64>> {
    let dx = 2.0 * l / n as f64;
    let x = |i: usize| -l + i as f64 * dx;
    let xi: Vec<f64> = (0..n)
        .map(|k| {
            let s = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            s * std::f64::consts::PI / l
        })
        .collect();
    let om: Vec<f64> = xi.iter().map(|&z| sym.phase(z.abs())).collect();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let to_hat = |v: &[f64]| {
        let mut b: Vec<C64> = v.iter().map(|&r| C64::new(r, 0.0)).collect();
        fwd.process(&mut b);
        b
    };
    let to_phys = |b: &[C64]| {
        let mut c = b.to_vec();
        inv.process(&mut c);
        c.iter().map(|z| z.re / n as f64).collect::<Vec<f64>>()
    };
    let odd = |i: usize, v: f64| {
        let xv = x(i);
        if xv > 0.0 {
            v
        } else if xv < 0.0 {
            -v
        } else {
            0.0
        }
    };
    let u0: Vec<f64> = (0..n)
        .map(|i| {
            let xv = x(i);
            if xv > 0.0 {
                phi(xv)
            } else if xv < 0.0 {
                -phi(-xv)
            } else {
                0.0
            }
        })
        .collect();
    let mut u = to_hat(&u0);
    let mut v = vec![C64::new(0.0, 0.0); n];
    // v̂' = −φ²û + ξ² (odd(u²))^
    let nonlin = |u: &[C64]| -> Vec<C64> {
        let p = to_phys(u);
        let sq: Vec<f64> = (0..n).map(|i| odd(i, p[i] * p[i])).collect();
        let mut h = to_hat(&sq);
        for k in 0..n {
            if 3 * (k.min(n - k)) > n {
                h[k] = C64::new(0.0, 0.0);
            } else {
                h[k] *= coupling * xi[k] * xi[k];
            }
        }
        h
    };
    // Exact linear flow of (u, v) over time s for mode k.
    let flow = |k: usize, u: C64, v: C64, s: f64| -> (C64, C64) {
        let w = om[k];
        let (c, sn) = ((w * s).cos(), (w * s).sin());
        if w == 0.0 {
            (u + v * s, v)
        } else {
            (u * c + v * (sn / w), -u * (w * sn) + v * c)
        }
    };
    let h = out_dt / substeps as f64;
    let mut out = Vec::with_capacity(n_out + 1);
    let snapshot = |u: &[C64]| to_phys(u)[n / 2..].to_vec();
    out.push(snapshot(&u));
    for _ in 0..n_out {
        for _ in 0..substeps {
            // RK4 in the interaction picture.
            let k1 = nonlin(&u);
            let mut ua = vec![C64::default(); n];
            let mut va = vec![C64::default(); n];
            for k in 0..n {
                let (a, b) = flow(k, u[k], v[k] + k1[k] * (h / 2.0), h / 2.0);
                ua[k] = a;
                va[k] = b;
            }
            let k2 = nonlin(&ua);
            let mut ub = vec![C64::default(); n];
            let mut vb = vec![C64::default(); n];
            for k in 0..n {
                let (a0, b0) = flow(k, u[k], v[k], h / 2.0);
                let (a, b) = (a0, b0 + k2[k] * (h / 2.0));
                ub[k] = a;
                vb[k] = b;
            }
            let k3 = nonlin(&ub);
            let mut uc = vec![C64::default(); n];
            let mut vc = vec![C64::default(); n];
            for k in 0..n {
                let (a0, b0) = flow(k, u[k], v[k], h / 2.0);
                let (a, b) = flow(k, a0, b0 + k3[k] * h, h / 2.0);
                uc[k] = a;
                vc[k] = b;
            }
            let k4 = nonlin(&uc);
            for k in 0..n {
                // Pull all stages to t + h in the rotating frame.
                let (u1, v1) = flow(k, u[k], v[k], h);
                let (d1u, d1v) = flow(k, C64::default(), k1[k], h);
                let (d2u, d2v) = flow(k, C64::default(), k2[k], h / 2.0);
                let (d3u, d3v) = flow(k, C64::default(), k3[k], h / 2.0);
                let (d4u, d4v) = (C64::default(), k4[k]);
                u[k] = u1 + (d1u + (d2u + d3u) * 2.0 + d4u) * (h / 6.0);
                v[k] = v1 + (d1v + (d2v + d3v) * 2.0 + d4v) * (h / 6.0);
            }
        }
        out.push(snapshot(&u));
    }
    out
}

pub fn config(l: f64, nx: usize, nt: usize) -> SolverConfig {
    SolverConfig {
        grid: SpaceTimeGrid::new(l, nx, 4.0, nt).unwrap(),
        ..SolverConfig::default()
    }
}

pub fn initial_only(phi: Profile) -> ProblemData {
    ProblemData {
        phi,
        psi: Profile::Zero,
        boundary: BoundaryTriple::zero(-0.7),
    }
}

pub fn hs_proxy(p: &Profile, grid: &SpaceTimeGrid, s: f64) -> f64 {
    let v: Vec<C64> = (grid.x0_index()..grid.nx)
        .map(|i| C64::new(p.eval(grid.x(i)), 0.0))
        .collect();
    sobolev_norm_halfline(&v, grid.dx(), s)
}

/// Relative L² distance to the sine-series oracle on `x ∈ [0, L/2]`, `t ∈ [0, 1]`.
pub fn oracle_distance(rep: &PicardReport, sym: &PhaseSymbol, phi: &Profile) -> f64 {
    let g = rep.solution.grid;
    let n_out = (1.0 / g.dt()).round() as usize;
    let orc = sine_oracle(sym, g.x_extent, g.nx, |x| phi.eval(x), g.dt(), n_out, 16, 1.0);
    let (mut e, mut n) = (0.0, 0.0);
    for (m, snap) in orc.iter().enumerate() {
        for (i, o) in snap.iter().enumerate().take(g.nx / 4) {
            let v = rep.solution.values[[g.x0_index() + i, g.t0_index() + m]].re;
            e += (v - o).powi(2);
            n += o.powi(2);
        }
    }
    (e / n).sqrt()
}

/// Residual on `x ∈ [0.5, 5]`, `t ∈ [0.1, 0.9]` with its scale.
pub fn solution_residual(rep: &PicardReport) -> (f64, f64) {
    rep.interior_residual((0.5, 5.0), (0.1, 0.9)).unwrap()
}

/// Unscaled solutions at λ = 2 and λ = 4 on original `t ≤ 1/64`.
pub fn scaling_mismatch(d: &ProblemData, cfg: &SolverConfig) -> f64 {
    let a = solve_at_lambda(d, cfg, 2.0).unwrap();
    let b = solve_at_lambda(d, cfg, 4.0).unwrap();
    let g = cfg.grid;
    let (i0, n0) = (g.x0_index(), g.t0_index());
    let (mut e, mut n) = (0.0, 0.0);
    for m in 0..=8 {
        for j in 0..g.nx / 4 {
            let va = a.original_value(i0 + j, n0 + m);
            let vb = b.original_value(i0 + 2 * j, n0 + 8 * m);
            e += (va - vb).powi(2);
            n += va.powi(2);
        }
    }
    (e / n).sqrt()
}

/// Relative L² error of the traces `u, u_xx, u_xxxx` at `x = 0` against the
/// lateral data on `t ∈ [0.25, 0.75]`.
pub fn trace_errors(rep: &PicardReport, h: &[Profile; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (c, j) in [0u32, 2, 4].into_iter().enumerate() {
        let (ts, tr) = rep.boundary_trace(j).unwrap();
        let (mut e, mut n) = (0.0, 0.0);
        for (t, v) in ts.iter().zip(&tr).filter(|(t, _)| (0.25..=0.75).contains(*t)) {
            e += (v - h[c].eval(*t)).powi(2);
            n += h[c].eval(*t).powi(2);
        }
        out[c] = (e / n).sqrt();
    }
    out
}

pub fn single_channel(ch: usize, profile: Profile) -> BoundaryTriple {
    let mut h = [Profile::Zero, Profile::Zero, Profile::Zero];
    h[ch] = profile;
    BoundaryTriple { h, s: -0.7 }
}

fn boundary_values(bt: &BoundaryTriple, sym: &PhaseSymbol, cfg: &BoundaryConfig, w: &EvalWindow, dx: u32, dt: u32) -> ndarray::Array2<f64> {
    BoundaryPlan::new(bt, sym, cfg, w).unwrap().total(w, dx, dt, cfg).unwrap()
}

/// Relative L² error of `∂_x^{2ch} W_bdr(0, t)` against `h_ch` on `t ∈ [0, 1]`.
pub fn boundary_reproduction(bt: &BoundaryTriple, sym: &PhaseSymbol, ch: usize) -> f64 {
    let cfg = BoundaryConfig::default();
    let w = EvalWindow::uniform(0.0, 0.0, 1, 0.0, 1.0, 201).unwrap();
    let u = boundary_values(bt, sym, &cfg, &w, 2 * ch as u32, 0);
    let (mut e, mut n) = (0.0, 0.0);
    for (k, &t) in w.ts.iter().enumerate() {
        let want = bt.h[ch].eval(t);
        e += (u[[0, k]] - want).powi(2);
        n += want * want;
    }
    (e / n).sqrt()
}

/// Max interior residual of the linear equation for `W_bdr` on
/// `x ∈ [0.5, 5]`, `t ∈ [0.2, 0.8]`, with the largest term as scale.
pub fn boundary_residual(bt: &BoundaryTriple, sym: &PhaseSymbol) -> (f64, f64) {
    let cfg = BoundaryConfig::default();
    let dx = 0.05;
    let w = EvalWindow::new(
        (0..=120).map(|i| i as f64 * dx).collect(),
        (0..=12).map(|k| 0.2 + 0.05 * k as f64).collect(),
    )
    .unwrap();
    let u = boundary_values(bt, sym, &cfg, &w, 0, 0);
    let utt = boundary_values(bt, sym, &cfg, &w, 0, 2);
    let (a, b) = (sym.alpha(), sym.beta());
    let (mut res, mut scale) = (0.0f64, 0.0f64);
    for k in 0..w.ts.len() {
        let col: Vec<f64> = (0..w.xs.len()).map(|i| u[[i, k]]).collect();
        for i in 10..=100 {
            let d2 = fd::derivative(&col, dx, i, 2, 15);
            let d4 = fd::derivative(&col, dx, i, 4, 15);
            let d6 = fd::derivative(&col, dx, i, 6, 15);
            let r = utt[[i, k]] - a * a * d2 + a * b * d4 - d6;
            res = res.max(r.abs());
            scale = scale.max(utt[[i, k]].abs()).max(d6.abs());
        }
    }
    (res, scale)
}

fn interior_window() -> EvalWindow {
    EvalWindow::uniform(0.0, 4.0, 17, 0.0, 1.0, 21).unwrap()
}

fn max_rel_diff(a: &ndarray::Array2<f64>, b: &ndarray::Array2<f64>) -> f64 {
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

/// Max change of `W_bdr` when every quadrature node count is doubled.
pub fn boundary_self_convergence(bt: &BoundaryTriple, sym: &PhaseSymbol) -> f64 {
    let cfg = BoundaryConfig::default();
    let w = interior_window();
    let coarse = boundary_values(bt, sym, &cfg, &w, 0, 0);
    let fine = boundary_values(bt, sym, &cfg.refined(), &w, 0, 0);
    max_rel_diff(&coarse, &fine)
}

/// `‖W(a·A + b·B) − a·W(A) − b·W(B)‖_∞` relative to the combined output.
pub fn boundary_linearity(x: &BoundaryTriple, y: &BoundaryTriple, a: f64, b: f64, sym: &PhaseSymbol) -> f64 {
    let cfg = BoundaryConfig::default();
    let w = interior_window();
    let joint = boundary_values(&x.combine(a, y, b), sym, &cfg, &w, 0, 0);
    let wx = boundary_values(x, sym, &cfg, &w, 0, 0);
    let wy = boundary_values(y, sym, &cfg, &w, 0, 0);
    max_rel_diff(&(&wx * a + &wy * b), &joint)
}
