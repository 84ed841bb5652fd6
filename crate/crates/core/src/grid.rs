//! Grid metadata for periodic spatial boxes and uniform time intervals.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid dimension {0} not supported (expected 0..=3)")]
    BadDimension(usize),
    #[error("points per axis must be a power of two >= 16, got {0}")]
    BadPointCount(usize),
    #[error("box side must be positive, got {0}")]
    BadBoxSide(f64),
    #[error("time grid needs positive final time and at least 2 points")]
    BadTimeGrid,
}

/// Periodic torus `[0, L)^n` sampled with `N` points per axis.
///
/// Dimension 0 is the degenerate single-point grid used for the transverse
/// direction of one-dimensional half-line problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    points: usize,
    box_len: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize, box_len: f64) -> Result<Self, GridError> {
        if dim > 3 {
            return Err(GridError::BadDimension(dim));
        }
        if dim > 0 && (points < 16 || !points.is_power_of_two()) {
            return Err(GridError::BadPointCount(points));
        }
        if !(box_len > 0.0) {
            return Err(GridError::BadBoxSide(box_len));
        }
        let points = if dim == 0 { 1 } else { points };
        Ok(Self { dim, points, box_len })
    }

    /// Degenerate zero-dimensional grid (a single point).
    pub fn point() -> Self {
        Self { dim: 0, points: 1, box_len: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    /// Sample spacing along one axis.
    pub fn spacing(&self) -> f64 {
        self.box_len / self.points as f64
    }

    /// Volume of one grid cell, `(L/N)^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Smallest nonzero frequency magnitude on the lattice, `2π/L`.
    pub fn fundamental_freq(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_len
    }

    /// Largest representable frequency magnitude along one axis, `πN/L`.
    pub fn nyquist_freq(&self) -> f64 {
        std::f64::consts::PI * self.points as f64 / self.box_len
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.points; self.dim]
    }

    pub fn total_points(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    /// Signed lattice index for axis position `i` (DFT ordering).
    pub fn signed_index(&self, i: usize) -> i64 {
        debug_assert!(i < self.points);
        if i <= self.points / 2 {
            i as i64
        } else {
            i as i64 - self.points as i64
        }
    }

    /// Angular frequency of axis position `i`.
    pub fn freq_component(&self, i: usize) -> f64 {
        self.fundamental_freq() * self.signed_index(i) as f64
    }

    /// The grid over the same box restricted to the sub-grid that a half
    /// field occupies in its last axis (`x_n` in `[0, L/2)`).
    pub fn half_points(&self) -> usize {
        self.points / 2
    }
}

/// Uniform time grid `t_i = i T / Nt`, `i = 0..Nt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_final: f64,
    nt: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, nt: usize) -> Result<Self, GridError> {
        if !(t_final > 0.0) || nt < 2 {
            return Err(GridError::BadTimeGrid);
        }
        Ok(Self { t_final, nt })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.nt as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.dt() * i as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nt).map(move |i| self.time(i))
    }

    /// One-dimensional periodic grid for the zero-padded time circle
    /// `[0, pad * T)`, used to realise temporal dyadic blocks by DFT.
    pub fn padded_spec(&self, pad: usize) -> GridSpec {
        let pts = (self.nt * pad).next_power_of_two().max(16);
        GridSpec {
            dim: 1,
            points: pts,
            box_len: self.t_final * pts as f64 / self.nt as f64,
        }
    }
}
