//! Complex amplitudes on a [`SpaceTimeGrid`] in physical, dual, or
//! spatially-dual representation.
//!
//! The forward transform approximates the continuous Fourier transform over
//! the box, `û(ξ,τ) ≈ ∫∫ u e^{−i(xξ+tτ)} dx dt`, so that synthesis reads
//! `u = (2π)^{−2} ∫∫ û e^{i(xξ+tτ)} dξ dτ`.

use crate::error::{Error, Result};
use crate::grid::SpaceTimeGrid;
use ndarray::{Array2, Axis};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// Values at `(x_i, t_n)`.
    Physical,
    /// Values at `(ξ_k, τ_n)`.
    Dual,
    /// Values at `(ξ_k, t_n)`.
    SpatialDual,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Physical => "physical",
            Representation::Dual => "dual",
            Representation::SpatialDual => "spatial-dual",
        }
    }
}

/// Values are indexed `[x or ξ, t or τ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: SpaceTimeGrid,
    pub repr: Representation,
    pub values: Array2<C64>,
}

impl SpectralField {
    pub fn zeros(grid: SpaceTimeGrid, repr: Representation) -> Self {
        Self {
            grid,
            repr,
            values: Array2::zeros((grid.nx, grid.nt)),
        }
    }

    pub fn from_values(grid: SpaceTimeGrid, repr: Representation, values: Array2<C64>) -> Result<Self> {
        if values.dim() != (grid.nx, grid.nt) {
            return Err(Error::GridMismatch(format!(
                "array shape {:?} does not match grid ({}, {})",
                values.dim(),
                grid.nx,
                grid.nt
            )));
        }
        Ok(Self { grid, repr, values })
    }

    /// Physical field sampled from `f(x, t)`.
    pub fn from_fn<F: FnMut(f64, f64) -> C64>(grid: SpaceTimeGrid, mut f: F) -> Self {
        let values = Array2::from_shape_fn((grid.nx, grid.nt), |(i, n)| f(grid.x(i), grid.t(n)));
        Self {
            grid,
            repr: Representation::Physical,
            values,
        }
    }

    pub fn from_real_fn<F: FnMut(f64, f64) -> f64>(grid: SpaceTimeGrid, mut f: F) -> Self {
        Self::from_fn(grid, |x, t| C64::new(f(x, t), 0.0))
    }

    pub fn expect(&self, repr: Representation) -> Result<()> {
        if self.repr == repr {
            Ok(())
        } else {
            Err(Error::RepresentationMismatch {
                expected: repr.name(),
                found: self.repr.name(),
            })
        }
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid, other.grid
            )))
        }
    }

    pub fn to_dual(&self) -> Self {
        match self.repr {
            Representation::Dual => self.clone(),
            Representation::Physical => self.transformed(Axis(0), true).transformed(Axis(1), true),
            Representation::SpatialDual => self.transformed(Axis(1), true),
        }
        .with_repr(Representation::Dual)
    }

    pub fn to_physical(&self) -> Self {
        match self.repr {
            Representation::Physical => self.clone(),
            Representation::Dual => self.transformed(Axis(1), false).transformed(Axis(0), false),
            Representation::SpatialDual => self.transformed(Axis(0), false),
        }
        .with_repr(Representation::Physical)
    }

    pub fn to_spatial_dual(&self) -> Self {
        match self.repr {
            Representation::SpatialDual => self.clone(),
            Representation::Physical => self.transformed(Axis(0), true),
            Representation::Dual => self.transformed(Axis(1), false),
        }
        .with_repr(Representation::SpatialDual)
    }

    fn with_repr(mut self, repr: Representation) -> Self {
        self.repr = repr;
        self
    }

    fn transformed(&self, axis: Axis, forward: bool) -> Self {
        let spacing = if axis.index() == 0 {
            self.grid.dx()
        } else {
            self.grid.dt()
        };
        let mut values = self.values.clone();
        let lanes: Vec<_> = values.lanes_mut(axis).into_iter().collect();
        let n = self.values.len_of(axis);
        let fft = {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        };
        lanes.into_par_iter().for_each(|mut lane| {
            let mut buf: Vec<C64> = lane.iter().copied().collect();
            if forward {
                fft.process(&mut buf);
                box_phase(&mut buf, spacing);
            } else {
                box_phase(&mut buf, 1.0 / (n as f64 * spacing));
                fft.process(&mut buf);
            }
            for (dst, src) in lane.iter_mut().zip(buf) {
                *dst = src;
            }
        });
        Self {
            grid: self.grid,
            repr: self.repr,
            values,
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            values: self.values.mapv(|v| v * a),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        other.expect(self.repr)?;
        Ok(Self {
            values: &self.values + &other.values,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(Σ|u|² Δx Δt)^{1/2}` of a physical field.
    pub fn l2_physical(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx() * self.grid.dt()).sqrt()
    }

    /// Real part as a physical array (drops any imaginary residue).
    pub fn real_part(&self) -> Array2<f64> {
        self.values.mapv(|v| v.re)
    }
}

/// Multiplies bin `k` by `scale·(−1)^k`, the phase of a box starting at `−L`.
fn box_phase(buf: &mut [C64], scale: f64) {
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= if k % 2 == 0 { scale } else { -scale };
    }
}

/// Spectrum of a periodic sample vector starting at `−n·spacing/2`.
pub fn spectrum_1d(values: &[C64], spacing: f64) -> Vec<C64> {
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    box_phase(&mut buf, spacing);
    buf
}

/// Inverse of [`spectrum_1d`].
pub fn synthesis_1d(spectrum: &[C64], spacing: f64) -> Vec<C64> {
    let n = spectrum.len();
    let mut buf = spectrum.to_vec();
    box_phase(&mut buf, 1.0 / (n as f64 * spacing));
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> SpaceTimeGrid {
        SpaceTimeGrid::new(8.0, 32, 4.0, 16).unwrap()
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = grid();
        let f = SpectralField::from_fn(g, |_, _| C64::new(rng.gen_range(-1.0..1.0), 0.0));
        let back = f.to_dual().to_physical();
        let err = (&back.values - &f.values).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12 * f.max_abs());
        let via = f.to_spatial_dual().to_dual().to_spatial_dual().to_physical();
        assert!((&via.values - &f.values).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn constant_concentrates_at_origin() {
        let g = grid();
        let d = SpectralField::from_real_fn(g, |_, _| 1.0).to_dual();
        let area = 4.0 * g.x_extent * g.t_extent;
        assert!((d.values[[0, 0]] - area).norm() < 1e-10);
        let rest: f64 = d.values.iter().skip(1).map(|v| v.norm()).sum();
        assert!(rest < 1e-10);
    }

    #[test]
    fn single_mode_is_a_delta() {
        let g = grid();
        let k = 3;
        let xi = g.xi(k);
        let d = SpectralField::from_fn(g, |x, _| C64::from_polar(1.0, x * xi)).to_spatial_dual();
        for kk in 0..g.nx {
            let want = if kk == k { 2.0 * g.x_extent } else { 0.0 };
            assert!((d.values[[kk, 5]] - want).norm() < 1e-10);
        }
    }

    #[test]
    fn representation_is_checked() {
        let f = SpectralField::zeros(grid(), Representation::Physical);
        assert!(matches!(
            f.expect(Representation::Dual),
            Err(Error::RepresentationMismatch { .. })
        ));
    }
}
