//! Sampled fields on periodic grids: whole-torus, half-space, and
//! time-dependent variants.

use crate::fft;
use crate::grid::{GridSpec, TimeGrid};
use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("operation requires a grid of dimension >= {0}")]
    DimensionTooSmall(usize),
    #[error("shape does not match grid")]
    ShapeMismatch,
}

/// Which side of the DFT the samples currently represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Physical,
    Frequency,
}

/// A complex scalar field sampled on the full periodic grid.
///
/// Physical samples sit at `x_i = i L / N`; frequency samples follow DFT
/// ordering on the lattice `(2π/L) Z^n` truncated at Nyquist.
#[derive(Debug, Clone)]
pub struct Field {
    grid: GridSpec,
    domain: Domain,
    data: ArrayD<Complex64>,
}

impl Field {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            domain: Domain::Physical,
            data: ArrayD::zeros(IxDyn(&grid.shape())),
        }
    }

    pub fn constant(grid: GridSpec, value: Complex64) -> Self {
        Self {
            grid,
            domain: Domain::Physical,
            data: ArrayD::from_elem(IxDyn(&grid.shape()), value),
        }
    }

    /// Sample a function of the physical coordinates.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let h = grid.spacing();
        let data = ArrayD::from_shape_fn(IxDyn(&grid.shape()), |ix| {
            let x: Vec<f64> = (0..grid.dim()).map(|a| ix[a] as f64 * h).collect();
            f(&x)
        });
        Self { grid, domain: Domain::Physical, data }
    }

    pub fn from_data(grid: GridSpec, domain: Domain, data: ArrayD<Complex64>) -> Result<Self, FieldError> {
        if data.shape() != grid.shape().as_slice() {
            return Err(FieldError::ShapeMismatch);
        }
        Ok(Self { grid, domain, data })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn data(&self) -> &ArrayD<Complex64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut ArrayD<Complex64> {
        &mut self.data
    }

    /// A copy holding frequency-side samples.
    pub fn to_frequency(&self) -> Field {
        match self.domain {
            Domain::Frequency => self.clone(),
            Domain::Physical => {
                let mut data = self.data.clone();
                fft::dft_all_axes(&mut data);
                Field { grid: self.grid, domain: Domain::Frequency, data }
            }
        }
    }

    /// A copy holding physical-side samples.
    pub fn to_physical(&self) -> Field {
        match self.domain {
            Domain::Physical => self.clone(),
            Domain::Frequency => {
                let mut data = self.data.clone();
                fft::idft_all_axes(&mut data);
                Field { grid: self.grid, domain: Domain::Physical, data }
            }
        }
    }

    /// Apply a frequency multiplier `m(ξ)`; the result is returned in the
    /// same domain the input was in.
    pub fn apply_multiplier(&self, m: impl Fn(&[f64]) -> Complex64) -> Field {
        let mut hat = self.to_frequency();
        let grid = self.grid;
        let mut xi = vec![0.0; grid.dim()];
        for (ix, v) in hat.data.indexed_iter_mut() {
            for a in 0..grid.dim() {
                xi[a] = grid.freq_component(ix[a]);
            }
            *v *= m(&xi);
        }
        match self.domain {
            Domain::Frequency => hat,
            Domain::Physical => hat.to_physical(),
        }
    }

    /// Apply a real radial frequency multiplier `m(|ξ|)`.
    pub fn apply_radial_multiplier(&self, m: impl Fn(f64) -> f64) -> Field {
        self.apply_multiplier(|xi| {
            let r = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
            Complex64::new(m(r), 0.0)
        })
    }

    /// Torus `L^p` norm of the physical samples (cell-volume-weighted sum;
    /// grid max for `p = ∞`).
    pub fn lp_norm(&self, p: f64) -> f64 {
        let phys = self.to_physical();
        if p.is_infinite() {
            return phys.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let w = self.grid.cell_volume();
        let sum: f64 = phys.data.iter().map(|v| v.norm().powf(p)).sum();
        (w * sum).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        self.lp_norm(2.0)
    }

    /// Relative L² distance, with the norm of `other` as reference.
    pub fn rel_l2_error(&self, other: &Field) -> f64 {
        let diff = self.sub(other).expect("rel_l2_error: grid mismatch");
        let denom = other.l2_norm();
        if denom == 0.0 {
            diff.l2_norm()
        } else {
            diff.l2_norm() / denom
        }
    }

    pub fn add(&self, other: &Field) -> Result<Field, FieldError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field, FieldError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Field {
        let mut out = self.clone();
        out.data.mapv_inplace(|v| v * c);
        out
    }

    fn zip_with(
        &self,
        other: &Field,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Field, FieldError> {
        if self.grid != other.grid {
            return Err(FieldError::GridMismatch);
        }
        let other = match (self.domain, other.domain) {
            (Domain::Physical, Domain::Frequency) => other.to_physical(),
            (Domain::Frequency, Domain::Physical) => other.to_frequency(),
            _ => other.clone(),
        };
        let mut out = self.clone();
        ndarray::Zip::from(&mut out.data)
            .and(&other.data)
            .for_each(|a, &b| *a = f(*a, b));
        Ok(out)
    }

    /// Dilation `x ↦ 2x` for data numerically supported inside the box:
    /// `g_i = f_{2i}` where the doubled index stays in range, `0` beyond.
    /// This realises the Euclidean `f(2·)` (one compressed copy), so the
    /// `L^p` mass scales like `2^{-n/p}` up to the input's tail mass. The
    /// input must be band-limited below half Nyquist.
    pub fn dilate2(&self) -> Field {
        let phys = self.to_physical();
        let n = self.grid.points();
        let data = ArrayD::from_shape_fn(phys.data.raw_dim(), |ix| {
            let mut src = Vec::with_capacity(self.grid.dim());
            for a in 0..self.grid.dim() {
                let d = 2 * ix[a];
                if d >= n {
                    return Complex64::default();
                }
                src.push(d);
            }
            phys.data[IxDyn(&src)]
        });
        Field { grid: self.grid, domain: Domain::Physical, data }
    }

    /// Torus dilation `x ↦ 2x mod L` (`g_i = f_{2i mod N}`): doubles every
    /// lattice frequency, wrapping the samples around the box.
    pub fn dilate2_periodic(&self) -> Field {
        let phys = self.to_physical();
        let n = self.grid.points();
        let data = ArrayD::from_shape_fn(phys.data.raw_dim(), |ix| {
            let src: Vec<usize> = (0..self.grid.dim()).map(|a| (2 * ix[a]) % n).collect();
            phys.data[IxDyn(&src)]
        });
        Field { grid: self.grid, domain: Domain::Physical, data }
    }

    /// Zero the mean (the only "polynomial" mode the torus carries).
    pub fn remove_mean(&self) -> Field {
        let mut hat = self.to_frequency();
        let zero_ix = IxDyn(&vec![0; self.grid.dim()]);
        hat.data[zero_ix] = Complex64::default();
        match self.domain {
            Domain::Frequency => hat,
            Domain::Physical => hat.to_physical(),
        }
    }
}

/// A field on the half-space sub-grid `x_n ∈ [0, L/2)`.
///
/// The stored grid is the full torus the half field embeds into; the data's
/// last axis carries `N/2` samples.
#[derive(Debug, Clone)]
pub struct HalfField {
    grid: GridSpec,
    data: ArrayD<Complex64>,
}

impl HalfField {
    pub fn zeros(grid: GridSpec) -> Self {
        let mut shape = grid.shape();
        let last = shape.len() - 1;
        shape[last] = grid.half_points();
        Self { grid, data: ArrayD::zeros(IxDyn(&shape)) }
    }

    /// Sample a function of the physical coordinates (last coordinate is the
    /// boundary-normal direction, ranging over `[0, L/2)`).
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut out = Self::zeros(grid);
        let h = grid.spacing();
        let dim = grid.dim();
        for (ix, v) in out.data.indexed_iter_mut() {
            let x: Vec<f64> = (0..dim).map(|a| ix[a] as f64 * h).collect();
            *v = f(&x);
        }
        out
    }

    pub fn from_data(grid: GridSpec, data: ArrayD<Complex64>) -> Result<Self, FieldError> {
        let mut shape = grid.shape();
        let last = shape.len() - 1;
        shape[last] = grid.half_points();
        if data.shape() != shape.as_slice() {
            return Err(FieldError::ShapeMismatch);
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn data(&self) -> &ArrayD<Complex64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut ArrayD<Complex64> {
        &mut self.data
    }

    /// Half-space `L^p` norm (cell-weighted over the sub-grid).
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let w = self.grid.cell_volume();
        let sum: f64 = self.data.iter().map(|v| v.norm().powf(p)).sum();
        (w * sum).powf(1.0 / p)
    }

    pub fn sub(&self, other: &HalfField) -> Result<HalfField, FieldError> {
        if self.grid != other.grid {
            return Err(FieldError::GridMismatch);
        }
        let mut out = self.clone();
        ndarray::Zip::from(&mut out.data)
            .and(&other.data)
            .for_each(|a, &b| *a -= b);
        Ok(out)
    }

    pub fn rel_l2_error(&self, other: &HalfField) -> f64 {
        let diff = self.sub(other).expect("rel_l2_error: grid mismatch");
        let denom = other.lp_norm(2.0);
        if denom == 0.0 {
            diff.lp_norm(2.0)
        } else {
            diff.lp_norm(2.0) / denom
        }
    }
}

/// Boundary data on `R^{n-1}`: one spatial field per time sample.
///
/// Values are extended by zero outside `[0, T)` whenever a temporal
/// convolution is taken.
#[derive(Debug, Clone)]
pub struct TimeField {
    tgrid: TimeGrid,
    space: GridSpec,
    data: ArrayD<Complex64>,
}

impl TimeField {
    pub fn zeros(tgrid: TimeGrid, space: GridSpec) -> Self {
        let mut shape = vec![tgrid.nt()];
        shape.extend(space.shape());
        Self { tgrid, space, data: ArrayD::zeros(IxDyn(&shape)) }
    }

    pub fn from_fn(tgrid: TimeGrid, space: GridSpec, f: impl Fn(f64, &[f64]) -> Complex64) -> Self {
        let mut out = Self::zeros(tgrid, space);
        let h = space.spacing();
        let dim = space.dim();
        for (ix, v) in out.data.indexed_iter_mut() {
            let t = tgrid.time(ix[0]);
            let x: Vec<f64> = (0..dim).map(|a| ix[a + 1] as f64 * h).collect();
            *v = f(t, &x);
        }
        out
    }

    pub fn tgrid(&self) -> TimeGrid {
        self.tgrid
    }

    pub fn space(&self) -> GridSpec {
        self.space
    }

    pub fn data(&self) -> &ArrayD<Complex64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut ArrayD<Complex64> {
        &mut self.data
    }

    /// The spatial field at time index `i`.
    pub fn slice_at(&self, i: usize) -> Field {
        let view = self.data.index_axis(ndarray::Axis(0), i);
        Field::from_data(self.space, Domain::Physical, view.to_owned())
            .expect("slice shape matches space grid")
    }

    pub fn set_slice(&mut self, i: usize, f: &Field) {
        let mut view = self.data.index_axis_mut(ndarray::Axis(0), i);
        view.assign(f.data());
    }
}

/// Where the spatial samples of a [`SpaceTimeField`] live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialExtent {
    /// Full periodic torus.
    FullTorus,
    /// Half grid: last axis restricted to `x_n ∈ [0, L/2)`.
    HalfSpace,
}

/// A time-dependent field over the full torus or the half grid.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    tgrid: TimeGrid,
    space: GridSpec,
    extent: SpatialExtent,
    data: ArrayD<Complex64>,
}

impl SpaceTimeField {
    pub fn zeros(tgrid: TimeGrid, space: GridSpec, extent: SpatialExtent) -> Self {
        let mut shape = vec![tgrid.nt()];
        let mut sp = space.shape();
        if extent == SpatialExtent::HalfSpace {
            let last = sp.len() - 1;
            sp[last] = space.half_points();
        }
        shape.extend(sp);
        Self { tgrid, space, extent, data: ArrayD::zeros(IxDyn(&shape)) }
    }

    pub fn from_fn(
        tgrid: TimeGrid,
        space: GridSpec,
        extent: SpatialExtent,
        f: impl Fn(f64, &[f64]) -> Complex64,
    ) -> Self {
        let mut out = Self::zeros(tgrid, space, extent);
        let h = space.spacing();
        let dim = space.dim();
        for (ix, v) in out.data.indexed_iter_mut() {
            let t = tgrid.time(ix[0]);
            let x: Vec<f64> = (0..dim).map(|a| ix[a + 1] as f64 * h).collect();
            *v = f(t, &x);
        }
        out
    }

    pub fn tgrid(&self) -> TimeGrid {
        self.tgrid
    }

    pub fn space(&self) -> GridSpec {
        self.space
    }

    pub fn extent(&self) -> SpatialExtent {
        self.extent
    }

    pub fn data(&self) -> &ArrayD<Complex64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut ArrayD<Complex64> {
        &mut self.data
    }

    pub fn slice_field(&self, i: usize) -> Field {
        assert_eq!(self.extent, SpatialExtent::FullTorus);
        let view = self.data.index_axis(ndarray::Axis(0), i);
        Field::from_data(self.space, Domain::Physical, view.to_owned())
            .expect("slice shape matches space grid")
    }

    pub fn slice_half(&self, i: usize) -> HalfField {
        assert_eq!(self.extent, SpatialExtent::HalfSpace);
        let view = self.data.index_axis(ndarray::Axis(0), i);
        HalfField::from_data(self.space, view.to_owned()).expect("slice shape matches half grid")
    }

    pub fn set_slice(&mut self, i: usize, data: &ArrayD<Complex64>) {
        let mut view = self.data.index_axis_mut(ndarray::Axis(0), i);
        view.assign(data);
    }

    pub fn scale(&self, c: Complex64) -> SpaceTimeField {
        let mut out = self.clone();
        out.data.mapv_inplace(|v| v * c);
        out
    }

    pub fn add(&self, other: &SpaceTimeField) -> SpaceTimeField {
        assert_eq!(self.data.shape(), other.data.shape());
        let mut out = self.clone();
        ndarray::Zip::from(&mut out.data)
            .and(&other.data)
            .for_each(|a, &b| *a += b);
        out
    }

    pub fn sub(&self, other: &SpaceTimeField) -> SpaceTimeField {
        assert_eq!(self.data.shape(), other.data.shape());
        let mut out = self.clone();
        ndarray::Zip::from(&mut out.data)
            .and(&other.data)
            .for_each(|a, &b| *a -= b);
        out
    }

    /// Max over samples of |value|, as a cheap global magnitude gauge.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
