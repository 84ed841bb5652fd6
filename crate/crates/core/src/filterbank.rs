//! Dyadic decompositions of unity and their action on sampled fields.
//!
//! The mother low-pass profile is `ζ̂(r) = S(2 - r)` with the smooth step
//! `S(x) = e(x) / (e(x) + e(1-x))`, `e(x) = exp(-1/x)` for `x > 0` and `0`
//! otherwise. It is exactly `1` on `[0, 1]`, exactly `0` on `[2, ∞)`, and
//! C^∞ in between. The annular bump is `φ̂(r) = ζ̂(r) - ζ̂(2r)`, so every
//! telescoping identity below holds pointwise to machine precision by
//! construction rather than by approximation.

use crate::field::{Field, FieldError};
use crate::grid::GridSpec;
use crate::quad;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FilterBankError {
    #[error("dyadic window [{jmin}, {jmax}] is narrower than 2 octaves")]
    WindowTooNarrow { jmin: i32, jmax: i32 },
    #[error(
        "window out of band: 2^(jmax+1) = {top} exceeds the grid Nyquist frequency {nyquist}"
    )]
    WindowOutOfBand { top: f64, nyquist: f64 },
    #[error("block index {j} outside window [{jmin}, {jmax}]")]
    IndexOutsideWindow { j: i32, jmin: i32, jmax: i32 },
    #[error("separated-variable blocks need dimension >= 2")]
    DimensionTooSmall,
    #[error("partition_residual needs at least 100 samples, got {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The mother dyadic profile together with its evaluation cache resolution.
///
/// The cache stores Gauss-Legendre samples of `φ̂` over its support; it backs
/// the physical-side bump evaluation used for η-convolutions. Direct calls to
/// `zeta` / `phi` always use the closed form.
#[derive(Debug, Clone)]
pub struct DyadicProfile {
    resolution: usize,
    // Gauss nodes/weights on [1/2, 2] and φ̂ values there.
    bump_nodes: Vec<f64>,
    bump_weights: Vec<f64>,
    bump_values: Vec<f64>,
}

impl Default for DyadicProfile {
    fn default() -> Self {
        Self::new(1024)
    }
}

impl DyadicProfile {
    pub fn new(resolution: usize) -> Self {
        let resolution = resolution.max(16);
        let (nodes, weights) = quad::gauss_legendre_on(resolution, 0.5, 2.0);
        let values = nodes.iter().map(|&r| phi_closed(r)).collect();
        Self {
            resolution,
            bump_nodes: nodes,
            bump_weights: weights,
            bump_values: values,
        }
    }

    /// Identifier recorded in reports; all measured constants depend on the
    /// profile choice.
    pub fn id(&self) -> String {
        format!("smoothstep-exp-r{}", self.resolution)
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Low-pass profile `ζ̂(r)`: 1 on [0,1], 0 on [2,∞), smoothly decreasing.
    pub fn zeta(&self, r: f64) -> f64 {
        zeta_closed(r)
    }

    /// Annular bump `φ̂(r) = ζ̂(r) - ζ̂(2r)`, supported in (1/2, 2).
    pub fn phi(&self, r: f64) -> f64 {
        phi_closed(r)
    }

    /// `ζ̂_m(r) = ζ̂(2^{-m} r)`.
    pub fn zeta_m(&self, m: i32, r: f64) -> f64 {
        zeta_closed(scale_dyadic(r, -m))
    }

    /// `φ̂_m(r) = φ̂(2^{-m} r)`.
    pub fn phi_m(&self, m: i32, r: f64) -> f64 {
        phi_closed(scale_dyadic(r, -m))
    }

    /// Physical-side mother bump `φ(y)`, normalized so that the plain
    /// convolution `φ_m * g` has transform `φ̂(2^{-m}|ν|) ĝ(ν)`:
    /// `φ(y) = (1/π) ∫_0^∞ φ̂(u) cos(yu) du`.
    pub fn phi_physical(&self, y: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.bump_nodes.len() {
            acc += self.bump_weights[i] * self.bump_values[i] * (y * self.bump_nodes[i]).cos();
        }
        acc / std::f64::consts::PI
    }

    /// `φ_m(y) = 2^m φ(2^m y)`.
    pub fn phi_physical_m(&self, m: i32, y: f64) -> f64 {
        let s = pow2(m);
        s * self.phi_physical(s * y)
    }
}

fn smooth_exp(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

fn zeta_closed(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let x = 2.0 - r;
        let a = smooth_exp(x);
        let b = smooth_exp(1.0 - x);
        a / (a + b)
    }
}

fn phi_closed(r: f64) -> f64 {
    zeta_closed(r) - zeta_closed(2.0 * r)
}

fn scale_dyadic(r: f64, e: i32) -> f64 {
    r * pow2(e)
}

/// `2^e` as f64.
pub fn pow2(e: i32) -> f64 {
    (e as f64).exp2()
}

/// A truncated dyadic window over a fixed grid.
///
/// Immutable after construction; all operations are pure.
#[derive(Debug, Clone)]
pub struct FilterBank {
    profile: DyadicProfile,
    jmin: i32,
    jmax: i32,
    grid: GridSpec,
    low_band_unresolved: bool,
}

impl FilterBank {
    /// Build a bank whose multipliers satisfy the telescoping and partition
    /// identities on the grid's frequency lattice.
    ///
    /// Fails when the window is narrower than two octaves or when the top
    /// block would not fit under the grid's Nyquist frequency. A window
    /// reaching below the fundamental frequency is allowed (those blocks
    /// simply vanish on the lattice) but is flagged.
    pub fn new(
        profile: DyadicProfile,
        jmin: i32,
        jmax: i32,
        grid: GridSpec,
    ) -> Result<Self, FilterBankError> {
        if jmax - jmin < 2 {
            return Err(FilterBankError::WindowTooNarrow { jmin, jmax });
        }
        let top = pow2(jmax + 1);
        let nyquist = grid.nyquist_freq();
        if top > nyquist * (1.0 + 1e-12) {
            return Err(FilterBankError::WindowOutOfBand { top, nyquist });
        }
        let low_band_unresolved = pow2(jmin - 1) < grid.fundamental_freq() * (1.0 - 1e-12);
        Ok(Self { profile, jmin, jmax, grid, low_band_unresolved })
    }

    pub fn profile(&self) -> &DyadicProfile {
        &self.profile
    }

    pub fn jmin(&self) -> i32 {
        self.jmin
    }

    pub fn jmax(&self) -> i32 {
        self.jmax
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn window(&self) -> impl Iterator<Item = i32> {
        self.jmin..=self.jmax
    }

    /// True when `2^(jmin-1)` sits below the grid's fundamental frequency,
    /// i.e. the lowest blocks act trivially on the lattice.
    pub fn low_band_unresolved(&self) -> bool {
        self.low_band_unresolved
    }

    fn check_grid(&self, f: &Field) -> Result<(), FilterBankError> {
        if f.grid() != self.grid {
            return Err(FieldError::GridMismatch.into());
        }
        Ok(())
    }

    /// Annular block: DFT-side multiplication by `φ̂_j(|ξ|)`.
    pub fn lp_block(&self, f: &Field, j: i32) -> Result<Field, FilterBankError> {
        self.check_grid(f)?;
        if j < self.jmin || j > self.jmax {
            return Err(FilterBankError::IndexOutsideWindow { j, jmin: self.jmin, jmax: self.jmax });
        }
        Ok(f.apply_radial_multiplier(|r| self.profile.phi_m(j, r)))
    }

    /// Low-pass block: DFT-side multiplication by `ζ̂_m(|ξ|)`.
    pub fn low_pass(&self, f: &Field, m: i32) -> Result<Field, FilterBankError> {
        self.check_grid(f)?;
        Ok(f.apply_radial_multiplier(|r| self.profile.zeta_m(m, r)))
    }

    /// High-frequency leftover beyond the window: multiplication by
    /// `1 - ζ̂_{jmax}(|ξ|)`.
    pub fn leftover_high(&self, f: &Field) -> Result<Field, FilterBankError> {
        self.check_grid(f)?;
        Ok(f.apply_radial_multiplier(|r| 1.0 - self.profile.zeta_m(self.jmax, r)))
    }

    /// Low-frequency leftover below the window: `ζ̂_{jmin-1}(|ξ|)`.
    pub fn leftover_low(&self, f: &Field) -> Result<Field, FilterBankError> {
        self.low_pass(f, self.jmin - 1)
    }

    /// Separated-variable block: multiplication by
    /// `Φ̄̂_m(ξ) = φ̂_m(|ξ'|) ζ̂_{m-1}(ξ_n) + ζ̂_m(|ξ'|) φ̂_m(ξ_n)`
    /// where `ξ_n` is the last axis.
    pub fn split_block(&self, f: &Field, m: i32) -> Result<Field, FilterBankError> {
        self.check_grid(f)?;
        if self.grid.dim() < 2 {
            return Err(FilterBankError::DimensionTooSmall);
        }
        let p = &self.profile;
        Ok(f.apply_multiplier(|xi| {
            let last = xi.len() - 1;
            let rho = xi[..last].iter().map(|c| c * c).sum::<f64>().sqrt();
            let nu = xi[last].abs();
            let v = p.phi_m(m, rho) * p.zeta_m(m - 1, nu) + p.zeta_m(m, rho) * p.phi_m(m, nu);
            Complex64::new(v, 0.0)
        }))
    }

    /// Value of `Φ̄̂_m` at a given `(|ξ'|, ξ_n)` pair.
    pub fn split_symbol(&self, m: i32, rho: f64, xi_n: f64) -> f64 {
        let p = &self.profile;
        p.phi_m(m, rho) * p.zeta_m(m - 1, xi_n.abs()) + p.zeta_m(m, rho) * p.phi_m(m, xi_n.abs())
    }

    /// Max over log-spaced in-window radii of `|Σ_j φ̂_j(r) - 1|`.
    pub fn partition_residual(&self, samples: usize) -> Result<f64, FilterBankError> {
        if samples < 100 {
            return Err(FilterBankError::TooFewSamples(samples));
        }
        let radii = quad::log_spaced(samples, pow2(self.jmin), pow2(self.jmax));
        Ok(radii
            .iter()
            .map(|&r| partition_residual_at(&self.profile, self.jmin, self.jmax, r))
            .fold(0.0, f64::max))
    }

    /// Max over sampled `(|ξ'|, ξ_n)` pairs with
    /// `2^jmin <= max(|ξ'|, |ξ_n|) <= 2^jmax` of `|Σ_m Φ̄̂_m(ξ) - 1|`.
    pub fn split_partition_residual(&self, samples_per_axis: usize) -> f64 {
        let radii = quad::log_spaced(samples_per_axis, pow2(self.jmin), pow2(self.jmax));
        let mut worst: f64 = 0.0;
        for &rho in &radii {
            for &nu in &radii {
                let sum: f64 = self.window().map(|m| self.split_symbol(m, rho, nu)).sum();
                worst = worst.max((sum - 1.0).abs());
            }
        }
        worst
    }
}

/// Residual `|Σ_{j=jmin}^{jmax} φ̂_j(r) - 1|` at a single radius.
pub fn partition_residual_at(profile: &DyadicProfile, jmin: i32, jmax: i32, r: f64) -> f64 {
    let sum: f64 = (jmin..=jmax).map(|j| profile.phi_m(j, r)).sum();
    (sum - 1.0).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use num_complex::Complex64;

    fn grid1() -> GridSpec {
        GridSpec::new(1, 256, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn default_bank() -> FilterBank {
        FilterBank::new(DyadicProfile::default(), -2, 4, grid1()).unwrap()
    }

    #[test]
    fn profile_shape() {
        let p = DyadicProfile::default();
        assert_eq!(p.zeta(0.0), 1.0);
        assert_eq!(p.zeta(1.0), 1.0);
        assert_eq!(p.zeta(2.0), 0.0);
        assert_eq!(p.zeta(5.0), 0.0);
        // monotone non-increasing
        let mut prev = 1.0;
        for i in 0..=200 {
            let r = 0.5 + 2.0 * i as f64 / 200.0;
            let v = p.zeta(r);
            assert!(v <= prev + 1e-15);
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
        // bump support
        assert_eq!(p.phi(0.5), 0.0);
        assert_eq!(p.phi(2.0), 0.0);
        assert!(p.phi(1.0) > 0.0);
        for i in 0..=100 {
            let r = 0.01 + 3.0 * i as f64 / 100.0;
            let v = p.phi(r);
            assert!((-1e-15..=1.0 + 1e-15).contains(&v));
        }
    }

    #[test]
    fn telescoping_is_exact() {
        // ζ̂_3(r) - ζ̂_2(r) = φ̂_3(r) at 64 sample radii
        let p = DyadicProfile::default();
        for i in 0..64 {
            let r = 0.25 + i as f64 * 0.5;
            let lhs = p.zeta_m(3, r) - p.zeta_m(2, r);
            let rhs = p.phi_m(3, r);
            assert!((lhs - rhs).abs() <= 1e-16 * 4.0, "r={r}: {lhs} vs {rhs}");
        }
        // and for every m in a window, at grid frequencies
        let g = grid1();
        for m in -2..=4 {
            for i in 0..g.points() {
                let r = g.freq_component(i).abs();
                let lhs = p.zeta_m(m, r);
                let rhs = p.zeta_m(m - 1, r) + p.phi_m(m, r);
                assert!((lhs - rhs).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn window_validation() {
        let g = GridSpec::new(1, 16, 2.0 * std::f64::consts::PI).unwrap();
        // Nyquist is 8; 2^{jmax+1} = 16 > 8
        let err = FilterBank::new(DyadicProfile::default(), 0, 3, g).unwrap_err();
        assert!(matches!(err, FilterBankError::WindowOutOfBand { .. }));
        let err = FilterBank::new(DyadicProfile::default(), 1, 2, g).unwrap_err();
        assert!(matches!(err, FilterBankError::WindowTooNarrow { .. }));
        // the canonical window constructs fine and flags its trivial low end
        let bank = default_bank();
        assert!(bank.low_band_unresolved());
    }

    #[test]
    fn partition_residual_examples() {
        let bank = default_bank();
        assert!(bank.partition_residual(1000).unwrap() < 1e-12);
        assert!(bank.partition_residual(99).is_err());

        let p = DyadicProfile::default();
        // outside the window the sum misses 1 entirely
        assert!((partition_residual_at(&p, -2, 4, pow2(5)) - 1.0).abs() < 1e-15);
        // a single block cannot cover its own octave
        assert!(partition_residual_at(&p, 0, 0, 1.5) > 0.0);
    }

    #[test]
    fn lp_block_support_and_reconstruction() {
        let g = grid1();
        let bank = default_bank();
        // f̂ supported exactly on |ξ| = 2^2
        let f = Field::from_fn(g, |x| Complex64::new((4.0 * x[0]).cos(), 0.0));
        for j in bank.window() {
            let b = bank.lp_block(&f, j).unwrap();
            if (j - 2).abs() >= 2 {
                assert!(b.l2_norm() < 1e-13, "j = {j} should not see |ξ|=4");
            }
        }
        // constant field is killed by every block
        let c = Field::constant(g, Complex64::new(3.0, 0.0));
        for j in bank.window() {
            assert!(bank.lp_block(&c, j).unwrap().l2_norm() < 1e-14);
        }
        // band-limited reconstruction: Σ_j blocks + leftover low-pass = f
        let f = Field::from_fn(g, |x| {
            Complex64::new(
                (2.0 * x[0]).cos() + 0.7 * (5.0 * x[0]).sin() + 0.3 * (11.0 * x[0]).cos() + 0.5,
                0.0,
            )
        });
        let mut sum = bank.leftover_low(&f).unwrap();
        for j in bank.window() {
            sum = sum.add(&bank.lp_block(&f, j).unwrap()).unwrap();
        }
        assert!(sum.rel_l2_error(&f) < 1e-10);
    }

    #[test]
    fn lp_block_rejects_bad_input() {
        let bank = default_bank();
        let other = Field::zeros(GridSpec::new(1, 64, 1.0).unwrap());
        assert!(matches!(
            bank.lp_block(&other, 0),
            Err(FilterBankError::Field(FieldError::GridMismatch))
        ));
        let f = Field::zeros(grid1());
        assert!(matches!(
            bank.lp_block(&f, 9),
            Err(FilterBankError::IndexOutsideWindow { .. })
        ));
    }

    #[test]
    fn low_pass_properties() {
        let g = grid1();
        let bank = default_bank();
        let c = Field::constant(g, Complex64::new(1.5, -0.5));
        assert!(bank.low_pass(&c, 0).unwrap().rel_l2_error(&c) < 1e-14);

        // f̂ supported on |ξ| >= 2^{m+1} is annihilated
        let f = Field::from_fn(g, |x| Complex64::new((8.0 * x[0]).cos(), 0.0));
        assert!(bank.low_pass(&f, 2).unwrap().l2_norm() < 1e-14);

        // composition: low_pass(·, m) ∘ low_pass(·, m-1) = low_pass(·, m-1)
        let f = Field::from_fn(g, |x| {
            Complex64::new((x[0]).cos() + (3.0 * x[0]).sin() + (7.0 * x[0]).cos(), 0.0)
        });
        let a = bank.low_pass(&bank.low_pass(&f, 1).unwrap(), 2).unwrap();
        let b = bank.low_pass(&f, 1).unwrap();
        assert!(a.rel_l2_error(&b) < 1e-12);
    }

    #[test]
    fn split_block_tensor_value_and_sum() {
        let g2 = GridSpec::new(2, 64, 2.0 * std::f64::consts::PI).unwrap();
        let bank = FilterBank::new(DyadicProfile::default(), 0, 4, g2).unwrap();
        let p = bank.profile();
        let m = 2;
        // point mass at (|ξ'|, ξ_n) = (2^m, 0)
        let v = bank.split_symbol(m, pow2(m), 0.0);
        assert!((v - p.phi(1.0)).abs() < 1e-15);
        // partition over the window
        assert!(bank.split_partition_residual(40) < 1e-10);
        // dimension guard
        let bank1 = default_bank();
        let f1 = Field::zeros(grid1());
        assert!(matches!(
            bank1.split_block(&f1, 0),
            Err(FilterBankError::DimensionTooSmall)
        ));
    }

    #[test]
    fn blocks_commute_and_respect_translation() {
        let g = grid1();
        let bank = default_bank();
        let f = Field::from_fn(g, |x| {
            Complex64::new((2.0 * x[0]).cos() + (6.0 * x[0]).sin(), (3.0 * x[0]).cos())
        });
        let ab = bank.lp_block(&bank.low_pass(&f, 3).unwrap(), 1).unwrap();
        let ba = bank.low_pass(&bank.lp_block(&f, 1).unwrap(), 3).unwrap();
        assert!(ab.rel_l2_error(&ba) < 1e-12);

        // translation on the torus commutes with any block
        let shift = 5;
        let translate = |f: &Field| {
            let n = g.points();
            let phys = f.to_physical();
            let data = ndarray::ArrayD::from_shape_fn(phys.data().raw_dim(), |ix| {
                phys.data()[ndarray::IxDyn(&[(ix[0] + shift) % n])]
            });
            Field::from_data(g, crate::field::Domain::Physical, data).unwrap()
        };
        let a = translate(&bank.lp_block(&f, 2).unwrap());
        let b = bank.lp_block(&translate(&f), 2).unwrap();
        assert!(a.rel_l2_error(&b) < 1e-10);
    }

    #[test]
    fn disjoint_annuli_have_zero_spectral_overlap() {
        let g = grid1();
        let bank = default_bank();
        let f = Field::from_fn(g, |x| {
            Complex64::new((1.0 * x[0]).cos() + (4.0 * x[0]).sin() + (13.0 * x[0]).cos(), 0.0)
        })
        .to_frequency();
        let b0 = bank.lp_block(&f, 0).unwrap();
        let b2 = bank.lp_block(&f, 2).unwrap();
        for (a, b) in b0.data().iter().zip(b2.data().iter()) {
            assert_eq!(a.norm() * b.norm(), 0.0);
        }
    }

    #[test]
    fn physical_bump_has_zero_mean_and_unit_transform() {
        let p = DyadicProfile::default();
        // ∫ φ(y) dy = φ̂(0) = 0: integrate numerically over a wide interval
        let (ys, ws) = quad::gauss_legendre_on(4000, -300.0, 300.0);
        let integral: f64 = ys.iter().zip(&ws).map(|(&y, &w)| w * p.phi_physical(y)).sum();
        assert!(integral.abs() < 1e-8, "mean = {integral}");
        // ∫ φ(y) cos(y) dy should recover φ̂(1) = 1
        let recovered: f64 = ys
            .iter()
            .zip(&ws)
            .map(|(&y, &w)| w * p.phi_physical(y) * (y).cos())
            .sum();
        assert!((recovered - p.phi(1.0)).abs() < 1e-6, "got {recovered}");
    }
}
