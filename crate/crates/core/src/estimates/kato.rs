//! Time regularity of spatial-derivative traces of the Duhamel term.

use super::{RandomForcing, RatioReport, SweepConfig};
use crate::error::{Error, Result};
use crate::field::{Representation, SpectralField};
use crate::grid::{eta, CutoffSpec, SpaceTimeGrid};
use crate::norms::{bourgain_norm_with, sobolev_norm_line_real, Modulation};
use crate::propagator::{duhamel, traces_at_zero};
use crate::symbols::PhaseSymbol;

/// `(ξ² f̂ / φ)` as a dual field.
pub(super) fn smoothed_forcing(f: &SpectralField, sym: &PhaseSymbol) -> SpectralField {
    let mut g = f.to_dual();
    let grid = g.grid;
    for ((k, _), v) in g.values.indexed_iter_mut() {
        let xi = grid.xi(k);
        *v *= if xi == 0.0 { 0.0 } else { xi * xi / sym.phase(xi) };
    }
    g
}

pub(super) fn sample_field(f: &RandomForcing, grid: SpaceTimeGrid) -> SpectralField {
    SpectralField::from_real_fn(grid, |x, t| f.eval(x, t))
}

/// One measurement: `‖η ∂_x^j D(f)(0,·)‖_{H^{(s−j+1)/3}_t} / ‖(ξ²f̂/φ)^∨‖_{X^{s+2,σ−1}}`.
/// Returns `None` for a vanishing right-hand side.
fn measure(j: u32, s: f64, sigma: f64, f: &SpectralField, sym: &PhaseSymbol) -> Result<Option<f64>> {
    let rhs = bourgain_norm_with(&smoothed_forcing(f, sym), sym, s + 2.0, sigma - 1.0, Modulation::Exact)?;
    if rhs == 0.0 {
        return Ok(None);
    }
    let d = duhamel(f, sym);
    let tr = traces_at_zero(&d, &[j])?;
    let cutoff = CutoffSpec::default();
    let series: Vec<f64> = tr.ts.iter().zip(&tr.values[0]).map(|(&t, &v)| eta(&cutoff, t) * v).collect();
    let lhs = sobolev_norm_line_real(&series, f.grid.dt(), (s - j as f64 + 1.0) / 3.0);
    Ok(Some(lhs / rhs))
}

/// Largest ratio over the random forcings at each refinement level.
pub fn kato_ratio(j: u32, s: f64, sigma: f64, cfg: &SweepConfig) -> Result<RatioReport> {
    cfg.validate()?;
    if j > 5 {
        return Err(Error::InvalidConfig(format!("trace order {j} outside 0..=5")));
    }
    if !((-1.0..=0.0).contains(&s) && sigma > 0.5) {
        return Err(Error::InvalidExponent(format!(
            "need -1 <= s <= 0 and sigma > 1/2, got ({s}, {sigma})"
        )));
    }
    let sym = PhaseSymbol::new(1.0, -1.0)?;
    let samples = RandomForcing::samples(cfg, 1);
    let mut ratios = Vec::new();
    for &n in &cfg.levels {
        let grid = SpaceTimeGrid::new(cfg.x_extent, n, cfg.t_extent, n)?;
        let mut best = 0.0_f64;
        for f in samples.iter().filter(|f| !f.is_zero()) {
            let field = sample_field(f, grid);
            debug_assert_eq!(field.repr, Representation::Physical);
            if let Some(r) = measure(j, s, sigma, &field, &sym)? {
                best = best.max(r);
            }
        }
        ratios.push(best);
    }
    RatioReport::new(
        "kato",
        vec![("j".into(), j as f64), ("s".into(), s), ("sigma".into(), sigma)],
        cfg.levels.iter().map(|&n| n as f64).collect(),
        ratios,
    )
}
