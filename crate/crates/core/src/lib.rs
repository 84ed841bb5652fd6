//! Dyadic Littlewood-Paley analysis on periodic grids, Besov / Lizorkin-Triebel
//! norms, half-space heat boundary potentials, and a half-space heat
//! initial-boundary-value solver, together with a harness that measures both
//! sides of the quantitative estimates these objects satisfy.
//!
//! The crate is organised around six areas:
//!
//! - [`grid`] / [`field`]: sampled complex fields on periodic spatial grids and
//!   uniform time grids, with physical-size metadata and FFT plumbing.
//! - [`filterbank`]: the dyadic decomposition of unity (annular blocks,
//!   low-pass cut-offs, and the separated-variable blocks) applied through
//!   discrete Fourier transforms.
//! - [`spaces`]: Besov, Lizorkin-Triebel and Bochner-in-time norms, plus the
//!   half-space zero-extension / restriction pair.
//! - [`kernels`]: the Dirichlet / Neumann / oblique boundary potentials and
//!   Green functions evaluated as Fourier multipliers with dyadic cut-offs.
//! - [`solver`]: the half-space heat solver built from reflection extensions,
//!   spectral whole-space propagation and boundary correctors.
//! - [`verify`]: parameter sweeps that tabulate measured quantities against
//!   envelope shapes and report ratio statistics and decay slopes.

pub mod field;
mod fft;
pub mod fieldio;
pub mod filterbank;
pub mod grid;
pub mod kernels;
pub mod quad;
pub mod report;
pub mod solver;
pub mod spaces;
pub mod synth;
pub mod verify;

pub use field::{Field, HalfField, SpaceTimeField, TimeField};
pub use filterbank::{DyadicProfile, FilterBank};
pub use grid::{GridSpec, TimeGrid};
pub use kernels::{KernelKind, KernelSpec};
pub use spaces::{NormParams, TimeNormParams};
