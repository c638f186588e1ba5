//! The Duhamel bound in Bourgain norms with a time-localization gain.

use super::kato::{sample_field, smoothed_forcing};
use super::{RandomForcing, RatioReport, SweepConfig};
use crate::error::{Error, Result};
use crate::grid::{eta, CutoffSpec, SpaceTimeGrid};
use crate::norms::{bourgain_norm_with, Modulation};
use crate::propagator::duhamel;
use crate::symbols::PhaseSymbol;

fn check_exponents(b: f64, bp: f64, t: f64) -> Result<()> {
    if !(bp > -0.5 && bp <= 0.0 && b >= 0.0 && b <= bp + 1.0 && t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidExponent(format!(
            "need -1/2 < b' <= 0 <= b <= b'+1 and 0 < T <= 1, got (b, b', T) = ({b}, {bp}, {t})"
        )));
    }
    Ok(())
}

/// `‖η(t/T) D(f)‖_{X^{s,b}} / (T^{1+b'−b} ‖(ξ²f̂/φ)^∨‖_{X^{s,b'}})`, or `None`
/// when the right-hand side vanishes.
fn measure(s: f64, b: f64, bp: f64, t_scale: f64, f: &RandomForcing, grid: SpaceTimeGrid, sym: &PhaseSymbol) -> Result<Option<f64>> {
    let field = sample_field(f, grid);
    let rhs = bourgain_norm_with(&smoothed_forcing(&field, sym), sym, s, bp, Modulation::Exact)?;
    if rhs == 0.0 {
        return Ok(None);
    }
    let mut d = duhamel(&field, sym);
    let cutoff = CutoffSpec::default();
    for ((_, n), v) in d.values.indexed_iter_mut() {
        *v *= eta(&cutoff, grid.t(n) / t_scale);
    }
    let lhs = bourgain_norm_with(&d.to_dual(), sym, s, b, Modulation::Exact)?;
    Ok(Some(lhs / (t_scale.powf(1.0 + bp - b) * rhs)))
}

fn max_ratio(s: f64, b: f64, bp: f64, t_scales: &[f64], samples: &[RandomForcing], grid: SpaceTimeGrid) -> Result<f64> {
    let sym = PhaseSymbol::new(1.0, -1.0)?;
    let mut best = 0.0_f64;
    for &t in t_scales {
        for f in samples.iter().filter(|f| !f.is_zero()) {
            if let Some(r) = measure(s, b, bp, t, f, grid, &sym)? {
                best = best.max(r);
            }
        }
    }
    Ok(best)
}

/// Largest ratio over forcings and time scales at each refinement level.
pub fn duhamel_ratio(s: f64, b: f64, bp: f64, t_scales: &[f64], cfg: &SweepConfig) -> Result<RatioReport> {
    cfg.validate()?;
    for &t in t_scales {
        check_exponents(b, bp, t)?;
    }
    let samples = RandomForcing::samples(cfg, 2);
    let ratios = cfg
        .levels
        .iter()
        .map(|&n| max_ratio(s, b, bp, t_scales, &samples, SpaceTimeGrid::new(cfg.x_extent, n, cfg.t_extent, n)?))
        .collect::<Result<Vec<_>>>()?;
    RatioReport::new(
        "duhamel",
        vec![("s".into(), s), ("b".into(), b), ("b_prime".into(), bp)],
        cfg.levels.iter().map(|&n| n as f64).collect(),
        ratios,
    )
}

/// Largest ratio over forcings for each `T` on a fixed grid of `level` nodes
/// per axis; the report's levels are `1/T`.
pub fn duhamel_time_sweep(s: f64, b: f64, bp: f64, t_scales: &[f64], level: usize, cfg: &SweepConfig) -> Result<RatioReport> {
    cfg.validate()?;
    let grid = SpaceTimeGrid::new(cfg.x_extent, level, cfg.t_extent, level)?;
    let samples = RandomForcing::samples(cfg, 2);
    let mut pts = t_scales
        .iter()
        .map(|&t| {
            check_exponents(b, bp, t)?;
            Ok((1.0 / t, max_ratio(s, b, bp, &[t], &samples, grid)?))
        })
        .collect::<Result<Vec<_>>>()?;
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    RatioReport::new(
        "duhamel_time",
        vec![("s".into(), s), ("b".into(), b), ("b_prime".into(), bp), ("level".into(), level as f64)],
        pts.iter().map(|p| p.0).collect(),
        pts.iter().map(|p| p.1).collect(),
    )
}
