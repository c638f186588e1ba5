//! Uniform space-time boxes, their discrete Fourier duals and the time cutoff η.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The box `[−L, L) × [−T, T)` with `nx × nt` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid {
    pub x_extent: f64,
    pub nx: usize,
    pub t_extent: f64,
    pub nt: usize,
}

impl Default for SpaceTimeGrid {
    fn default() -> Self {
        Self {
            x_extent: 40.0,
            nx: 1024,
            t_extent: 4.0,
            nt: 512,
        }
    }
}

impl SpaceTimeGrid {
    pub fn new(x_extent: f64, nx: usize, t_extent: f64, nt: usize) -> Result<Self> {
        let g = Self {
            x_extent,
            nx,
            t_extent,
            nt,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_extent > 0.0 && self.t_extent > 0.0) {
            return Err(Error::GridMismatch(format!(
                "extents must be positive, got L = {}, T = {}",
                self.x_extent, self.t_extent
            )));
        }
        if self.nx < 4 || self.nt < 4 || self.nx % 2 != 0 || self.nt % 2 != 0 {
            return Err(Error::GridMismatch(format!(
                "node counts must be even and at least 4, got nx = {}, nt = {}",
                self.nx, self.nt
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_extent / self.nx as f64
    }

    pub fn dt(&self) -> f64 {
        2.0 * self.t_extent / self.nt as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.x_extent + i as f64 * self.dx()
    }

    pub fn t(&self, n: usize) -> f64 {
        -self.t_extent + n as f64 * self.dt()
    }

    /// Index of `x = 0`.
    pub fn x0_index(&self) -> usize {
        self.nx / 2
    }

    /// Index of `t = 0`.
    pub fn t0_index(&self) -> usize {
        self.nt / 2
    }

    pub fn dxi(&self) -> f64 {
        PI / self.x_extent
    }

    pub fn dtau(&self) -> f64 {
        PI / self.t_extent
    }

    /// Wavenumber of FFT bin `k` (standard ordering, Nyquist bin negative).
    pub fn xi(&self, k: usize) -> f64 {
        signed_bin(k, self.nx) as f64 * self.dxi()
    }

    pub fn tau(&self, n: usize) -> f64 {
        signed_bin(n, self.nt) as f64 * self.dtau()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ts(&self) -> Vec<f64> {
        (0..self.nt).map(|n| self.t(n)).collect()
    }

    pub fn xis(&self) -> Vec<f64> {
        (0..self.nx).map(|k| self.xi(k)).collect()
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.nt).map(|n| self.tau(n)).collect()
    }

    /// Same box with both node counts doubled.
    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * self.nx,
            nt: 2 * self.nt,
            ..*self
        }
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.nx == other.nx
            && self.nt == other.nt
            && self.x_extent == other.x_extent
            && self.t_extent == other.t_extent
    }
}

/// FFT bin `k` of an `n`-point transform as a signed integer in `[−n/2, n/2)`.
pub fn signed_bin(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Plateau and support half-widths of the smooth time cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub inner: f64,
    pub outer: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self {
            inner: 1.0,
            outer: 2.0,
        }
    }
}

fn psi(r: f64) -> f64 {
    if r > 0.0 {
        (-1.0 / r).exp()
    } else {
        0.0
    }
}

/// `η(t) = ψ(b−|t|)/(ψ(b−|t|) + ψ(|t|−a))` with `ψ(r) = e^{−1/r}` for `r > 0`.
pub fn eta(c: &CutoffSpec, t: f64) -> f64 {
    let a = t.abs();
    if a <= c.inner {
        return 1.0;
    }
    if a >= c.outer {
        return 0.0;
    }
    let w = c.outer - c.inner;
    let p = psi((c.outer - a) / w);
    let q = psi((a - c.inner) / w);
    p / (p + q)
}
