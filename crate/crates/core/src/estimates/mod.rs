//! Numerical probes of the inequalities behind the contraction argument.
//!
//! Each probe measures a ratio `LHS/RHS` on a ladder of levels (refinements,
//! parameter sweeps or substitution scalings) and classifies the trend of the
//! ratio along the ladder. Every constant reported here is a lower bound on
//! the supremum it estimates.

mod bilinear;
mod duhamel_bound;
mod kato;
mod lemmas;

pub use bilinear::{bilinear_constant, bilinear_sweep, trilinear_value, BilinearLattice, BilinearResult};
pub use duhamel_bound::{duhamel_ratio, duhamel_time_sweep};
pub use kato::kato_ratio;
pub use lemmas::{check_lemma_int_tau, check_lemma_poly, int_tau_integral, poly_integral, PolyKind};

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Trend slope at or below which a ratio counts as bounded.
pub const STABLE_SLOPE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Growing,
}

/// Measured ratios along a ladder of levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub check: String,
    pub params: Vec<(String, f64)>,
    pub levels: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Largest ratio on the ladder: the fitted constant.
    pub constant: f64,
    /// Least-squares slope of `log ratio` against `log level`.
    pub trend_slope: f64,
    pub verdict: Verdict,
}

impl RatioReport {
    pub fn new(check: &str, params: Vec<(String, f64)>, levels: Vec<f64>, ratios: Vec<f64>) -> Result<Self> {
        if levels.len() < 3 || levels.len() != ratios.len() {
            return Err(Error::InvalidConfig(format!(
                "{check}: a trend needs at least three levels with one ratio each"
            )));
        }
        let trend_slope = log_log_slope(&levels, &ratios);
        let constant = ratios.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            check: check.to_string(),
            params,
            levels,
            ratios,
            constant,
            trend_slope,
            verdict: if trend_slope <= STABLE_SLOPE {
                Verdict::Stable
            } else {
                Verdict::Growing
            },
        })
    }

    /// Ratios divided by the fitted constant.
    pub fn normalized(&self) -> Vec<f64> {
        self.ratios.iter().map(|r| r / self.constant).collect()
    }

    /// `max/min − 1` over the ladder.
    pub fn spread(&self) -> f64 {
        let lo = self.ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        self.constant / lo - 1.0
    }

    /// Largest relative change between neighbouring levels.
    pub fn max_step_change(&self) -> f64 {
        self.ratios
            .windows(2)
            .map(|w| (w[1] / w[0] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Ratio of the last two levels.
    pub fn last_growth(&self) -> f64 {
        let n = self.ratios.len();
        self.ratios[n - 1] / self.ratios[n - 2]
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

fn log_log_slope(levels: &[f64], ratios: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .zip(ratios)
        .filter(|(l, r)| **l > 0.0 && **r > 0.0)
        .map(|(l, r)| (l.ln(), r.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub s_list: Vec<f64>,
    pub sigma_list: Vec<f64>,
    /// Refinement ladder; each entry is a node count per axis.
    pub levels: Vec<usize>,
    /// Random forcings per Kato or Duhamel measurement.
    pub samples: usize,
    /// Random restarts of the bilinear maximization at each level.
    pub restarts: usize,
    pub seed: u64,
    /// Half-widths of the space-time box used by the Kato and Duhamel probes.
    pub x_extent: f64,
    pub t_extent: f64,
    /// Lattice spacings of the bilinear probe.
    pub xi_spacing: f64,
    pub tau_spacing: f64,
    pub power_iterations: usize,
    pub power_tol: f64,
    /// Exponents `b`, `b'` and time scales `T` of the Duhamel probe.
    pub duhamel_b: f64,
    pub duhamel_b_prime: f64,
    pub time_scales: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            s_list: vec![-0.7],
            sigma_list: vec![0.55],
            levels: vec![64, 128, 256],
            samples: 20,
            restarts: 1,
            seed: 20240601,
            x_extent: 16.0,
            t_extent: 2.0,
            xi_spacing: 0.125,
            tau_spacing: 4.0,
            power_iterations: 400,
            power_tol: 1e-7,
            duhamel_b: 0.55,
            duhamel_b_prime: -0.4,
            time_scales: vec![0.5, 1.0],
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(sig) = self.sigma_list.iter().find(|s| !(**s > 0.5 && **s < 1.0)) {
            return Err(Error::InvalidExponent(format!("sigma must lie in (1/2, 1), got {sig}")));
        }
        if self.levels.len() < 3 || self.levels.iter().any(|&n| n < 8 || n % 2 != 0) {
            return Err(Error::InvalidConfig(
                "at least three even refinement levels of 8 or more are required".into(),
            ));
        }
        if !self.levels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("refinement levels must increase".into()));
        }
        if !(self.xi_spacing > 0.0 && self.tau_spacing > 0.0 && self.x_extent > 0.0) {
            return Err(Error::InvalidConfig("spacings and extents must be positive".into()));
        }
        if self.t_extent < 2.0 {
            return Err(Error::InvalidConfig(
                "t_extent must be at least 2 to hold the time cutoff".into(),
            ));
        }
        if self.time_scales.is_empty() {
            return Err(Error::InvalidConfig("time_scales must not be empty".into()));
        }
        if self.samples == 0 || self.power_iterations == 0 {
            return Err(Error::InvalidConfig("samples and power_iterations must be positive".into()));
        }
        Ok(())
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// A smooth forcing built from a few Gaussian wave packets in `(x, t)`,
/// supported (to roundoff) in `0 < t < 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForcing {
    pub packets: Vec<Packet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub amplitude: f64,
    pub x0: f64,
    pub t0: f64,
    pub x_width: f64,
    pub t_width: f64,
    pub xi0: f64,
    pub tau0: f64,
}

impl RandomForcing {
    pub fn sample<R: Rng>(rng: &mut R) -> Self {
        let count = rng.gen_range(1..=3);
        let packets = (0..count)
            .map(|_| Packet {
                amplitude: rng.gen_range(-1.0..1.0),
                x0: rng.gen_range(-4.0..4.0),
                t0: rng.gen_range(0.6..1.4),
                x_width: rng.gen_range(1.5..2.5),
                t_width: rng.gen_range(0.12..0.14),
                xi0: rng.gen_range(-0.75..0.75),
                tau0: rng.gen_range(-6.0..6.0),
            })
            .collect();
        Self { packets }
    }

    pub fn samples(cfg: &SweepConfig, stream: u64) -> Vec<Self> {
        let mut rng = cfg.rng(stream);
        (0..cfg.samples).map(|_| Self::sample(&mut rng)).collect()
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        self.packets
            .iter()
            .map(|p| {
                let (dx, dt) = ((x - p.x0) / p.x_width, (t - p.t0) / p.t_width);
                p.amplitude * (-dx * dx - dt * dt).exp() * (p.xi0 * x + p.tau0 * t).cos()
            })
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.packets.iter().all(|p| p.amplitude == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let levels = vec![64.0, 128.0, 256.0];
        let ratios: Vec<f64> = levels.iter().map(|l: &f64| 3.0 * l.powf(0.4)).collect();
        let r = RatioReport::new("p", vec![], levels, ratios).unwrap();
        assert!((r.trend_slope - 0.4).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Growing);
        assert!((r.last_growth() - 2f64.powf(0.4)).abs() < 1e-12);
    }

    #[test]
    fn flat_ratios_are_stable() {
        let r = RatioReport::new("f", vec![], vec![1.0, 2.0, 4.0], vec![1.0, 1.01, 0.99]).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);
        assert!(r.spread() < 0.021);
    }

    #[test]
    fn too_few_levels_rejected() {
        assert!(RatioReport::new("x", vec![], vec![1.0, 2.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn forcing_vanishes_near_the_time_edges() {
        let cfg = SweepConfig::default();
        for f in RandomForcing::samples(&cfg, 1) {
            for x in [-3.0, 0.0, 2.0] {
                assert!(f.eval(x, 0.0).abs() < 1e-6 && f.eval(x, 2.0).abs() < 1e-6);
            }
        }
    }
}
