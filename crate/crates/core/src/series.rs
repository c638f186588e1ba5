//! Compactly supported scalar profiles, used both as boundary data in `t` and
//! as initial data in `x`, and their Laplace transforms.

use crate::error::{Error, Result};
use crate::quadrature::composite;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// A compactly supported function of one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    /// `A·exp(1 − 1/(1−r²))` with `r = (t−c)/w` on `|r| < 1`; peak value `A`.
    Bump {
        center: f64,
        half_width: f64,
        amplitude: f64,
    },
    /// `A·exp(−(t−c)²/w²)` restricted to `|t−c| ≤ 8w`.
    GaussianTruncated {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// Uniform samples `values[k]` at `t0 + k·dt`, interpolated by local
    /// Lagrange polynomials of degree 7 and zero outside the sample range.
    Sampled { t0: f64, dt: f64, values: Vec<f64> },
    /// `Σ c_i s_i`.
    Sum(Vec<(f64, Profile)>),
    /// `base(t)·η(t)` for the cutoff with plateau `inner` and support `outer`.
    Windowed {
        inner: f64,
        outer: f64,
        base: Box<Profile>,
    },
}

const INTERP_POINTS: usize = 8;

impl Profile {
    pub fn bump(center: f64, half_width: f64, amplitude: f64) -> Self {
        Profile::Bump {
            center,
            half_width,
            amplitude,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Profile::Zero => true,
            Profile::Bump { amplitude, .. } | Profile::GaussianTruncated { amplitude, .. } => {
                *amplitude == 0.0
            }
            Profile::Sampled { values, .. } => values.iter().all(|v| *v == 0.0),
            Profile::Sum(parts) => parts.iter().all(|(c, s)| *c == 0.0 || s.is_zero()),
            Profile::Windowed { outer, base, .. } => {
                base.is_zero() || {
                    let (a, b) = base.support();
                    a >= *outer || b <= -*outer
                }
            }
        }
    }

    /// Checks the parameters and that the series vanishes for `t < 0`.
    pub fn validate(&self) -> Result<()> {
        let (a, _) = self.support();
        if a < 0.0 && !self.is_zero() {
            return Err(Error::InvalidConfig(format!(
                "boundary series must vanish for t < 0, support starts at {a}"
            )));
        }
        self.validate_shape()
    }

    /// Checks the parameters only; initial data may extend past `x = 0`.
    pub fn validate_shape(&self) -> Result<()> {
        match self {
            Profile::Bump { half_width, .. } if !(*half_width > 0.0) => Err(
                Error::InvalidConfig("bump half-width must be positive".into()),
            ),
            Profile::GaussianTruncated { width, .. } if !(*width > 0.0) => Err(
                Error::InvalidConfig("gaussian width must be positive".into()),
            ),
            Profile::Sampled { dt, values, .. } if !(*dt > 0.0) || values.len() < INTERP_POINTS => {
                Err(Error::InvalidConfig(format!(
                    "sampled series needs dt > 0 and at least {INTERP_POINTS} samples"
                )))
            }
            Profile::Sum(parts) => parts.iter().try_for_each(|(_, s)| s.validate_shape()),
            Profile::Windowed { base, .. } => base.validate_shape(),
            _ => Ok(()),
        }
    }

    /// Closed interval outside which the series vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Profile::Zero => (0.0, 0.0),
            Profile::Bump {
                center, half_width, ..
            } => (center - half_width, center + half_width),
            Profile::GaussianTruncated { center, width, .. } => {
                (center - 8.0 * width, center + 8.0 * width)
            }
            Profile::Sampled { t0, dt, values } => (*t0, t0 + dt * (values.len() - 1) as f64),
            Profile::Sum(parts) => {
                let live: Vec<(f64, f64)> = parts
                    .iter()
                    .filter(|(c, s)| *c != 0.0 && !s.is_zero())
                    .map(|(_, s)| s.support())
                    .collect();
                if live.is_empty() {
                    (0.0, 0.0)
                } else {
                    (
                        live.iter().map(|p| p.0).fold(f64::MAX, f64::min),
                        live.iter().map(|p| p.1).fold(f64::MIN, f64::max),
                    )
                }
            }
            Profile::Windowed { outer, base, .. } => {
                let (a, b) = base.support();
                (a.max(-outer), b.min(*outer))
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Bump {
                center,
                half_width,
                amplitude,
            } => {
                let r = (t - center) / half_width;
                if r.abs() >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - r * r)).exp()
                }
            }
            Profile::GaussianTruncated {
                center,
                width,
                amplitude,
            } => {
                let r = (t - center) / width;
                if r.abs() > 8.0 {
                    0.0
                } else {
                    amplitude * (-r * r).exp()
                }
            }
            Profile::Sampled { t0, dt, values } => interpolate(*t0, *dt, values, t),
            Profile::Sum(parts) => parts.iter().map(|(c, s)| c * s.eval(t)).sum(),
            Profile::Windowed { inner, outer, base } => {
                let w = crate::grid::eta(&crate::grid::CutoffSpec { inner: *inner, outer: *outer }, t);
                if w == 0.0 {
                    0.0
                } else {
                    w * base.eval(t)
                }
            }
        }
    }

    /// `t ↦ a·h(t/b)`, used by the λ-rescaling.
    pub fn rescaled(&self, a: f64, b: f64) -> Self {
        match self {
            Profile::Zero => Profile::Zero,
            Profile::Bump {
                center,
                half_width,
                amplitude,
            } => Profile::Bump {
                center: center * b,
                half_width: half_width * b,
                amplitude: amplitude * a,
            },
            Profile::GaussianTruncated {
                center,
                width,
                amplitude,
            } => Profile::GaussianTruncated {
                center: center * b,
                width: width * b,
                amplitude: amplitude * a,
            },
            Profile::Sampled { t0, dt, values } => Profile::Sampled {
                t0: t0 * b,
                dt: dt * b,
                values: values.iter().map(|v| v * a).collect(),
            },
            Profile::Sum(parts) => {
                Profile::Sum(parts.iter().map(|(c, s)| (*c, s.rescaled(a, b))).collect())
            }
            Profile::Windowed { inner, outer, base } => Profile::Windowed {
                inner: inner * b,
                outer: outer * b,
                base: Box::new(base.rescaled(a, b)),
            },
        }
    }

    /// Shortest sample spacing in the series, if it is sampled.
    pub fn sample_spacing(&self) -> Option<f64> {
        match self {
            Profile::Sampled { dt, .. } => Some(*dt),
            Profile::Sum(parts) => parts
                .iter()
                .filter_map(|(_, s)| s.sample_spacing())
                .reduce(f64::min),
            Profile::Windowed { base, .. } => base.sample_spacing(),
            _ => None,
        }
    }

    pub fn windowed(self, cutoff: &crate::grid::CutoffSpec) -> Self {
        Profile::Windowed {
            inner: cutoff.inner,
            outer: cutoff.outer,
            base: Box::new(self),
        }
    }

    /// Laplace rule resolving `e^{−ρt}` for `|Im ρ| ≤ max_freq`.
    pub fn laplace_rule(&self, max_freq: f64) -> Result<LaplaceRule> {
        LaplaceRule::build(self, max_freq)
    }
}

fn interpolate(t0: f64, dt: f64, values: &[f64], t: f64) -> f64 {
    let n = values.len();
    let s = (t - t0) / dt;
    if s < 0.0 || s > (n - 1) as f64 {
        return 0.0;
    }
    let k = s.floor() as isize;
    let start = (k - (INTERP_POINTS as isize / 2 - 1)).clamp(0, (n - INTERP_POINTS) as isize) as usize;
    let mut sum = 0.0;
    for i in 0..INTERP_POINTS {
        let xi = (start + i) as f64;
        if (s - xi).abs() < 1e-14 {
            return values[start + i];
        }
        let mut l = 1.0;
        for j in 0..INTERP_POINTS {
            if j != i {
                let xj = (start + j) as f64;
                l *= (s - xj) / (xi - xj);
            }
        }
        sum += l * values[start + i];
    }
    sum
}

/// Composite Gauss–Legendre rule over the support of a series, with the data
/// values folded into the weights: `h̃(ρ) = Σ_k w_k e^{−ρ t_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    l1: f64,
}

const LAPLACE_ORDER: usize = 16;
const LAPLACE_TOL: f64 = 1e-10;

impl LaplaceRule {
    fn with_panels(h: &Profile, panels: usize) -> Self {
        let (a, b) = h.support();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        if !h.is_zero() && b > a {
            let sample_aligned = h.sample_spacing().map(|dt| ((b - a) / dt).round() as usize);
            let panels = match sample_aligned {
                // keep panel edges on sample nodes so each panel sees one interpolant
                Some(cells) if cells > 0 => cells * panels.div_ceil(cells).max(1),
                _ => panels,
            };
            for (t, w) in composite(a, b, LAPLACE_ORDER, panels) {
                let v = h.eval(t);
                if v != 0.0 {
                    nodes.push(t);
                    weights.push(w * v);
                }
            }
        }
        let l1 = weights.iter().map(|w| w.abs()).sum();
        Self { nodes, weights, l1 }
    }

    fn build(h: &Profile, max_freq: f64) -> Result<Self> {
        h.validate()?;
        let (a, b) = h.support();
        let width = (b - a).max(0.0);
        // about one panel of 16 nodes per two periods at the top frequency
        let mut panels = ((max_freq * width / (4.0 * std::f64::consts::PI)).ceil() as usize).max(8);
        let probes: Vec<C64> = [0.0, 0.25, 0.5, 1.0]
            .iter()
            .map(|f| C64::new(1.0, f * max_freq))
            .collect();
        let mut rule = Self::with_panels(h, panels);
        for _ in 0..8 {
            let finer = Self::with_panels(h, 2 * panels);
            let ok = probes.iter().all(|&rho| {
                let (u, v) = (rule.eval(rho), finer.eval(rho));
                (u - v).norm() <= LAPLACE_TOL * v.norm().max(1e-4 * finer.l1 * (-rho.re * a).exp())
            });
            if ok {
                return Ok(finer);
            }
            rule = finer;
            panels *= 2;
        }
        Err(Error::NonconvergentQuadrature(format!(
            "Laplace transform of boundary data did not settle with {panels} panels"
        )))
    }

    pub fn is_zero(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn eval(&self, rho: C64) -> C64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * (-rho * t).exp())
            .sum()
    }

    /// `∫|h|`, approximately.
    pub fn l1(&self) -> f64 {
        self.l1
    }
}

/// `h̃(ρ) = ∫₀^∞ e^{−ρt} h(t) dt`.
pub fn laplace_boundary_transform(h: &Profile, rho: C64) -> Result<C64> {
    Ok(h.laplace_rule(rho.im.abs())?.eval(rho))
}

/// `h̃⁺(μ) = h̃(iφ(μ))`.
pub fn oscillatory_boundary_transform(
    h: &Profile,
    sym: &crate::symbols::PhaseSymbol,
    mu: f64,
) -> Result<C64> {
    laplace_boundary_transform(h, C64::new(0.0, sym.phase(mu)))
}
