//! Analytic test-data generators: Gaussian-envelope wave packets with
//! oscillatory carriers, reproducible from a seed.
//!
//! Packets are closures over explicit parameters, so dilations and
//! translations are exact rather than resampled, and the data keep
//! negligible mass outside the box (torus convolutions then approximate
//! their Euclidean counterparts).

use crate::field::{Field, HalfField, TimeField};
use crate::grid::{GridSpec, TimeGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A sum of plane waves under a Gaussian envelope:
/// `f(x) = exp(-|x-c|²/w²) Σ_m a_m cos(k_m·(x-c) + θ_m)`.
#[derive(Debug, Clone)]
pub struct WavePacket {
    pub center: Vec<f64>,
    pub width: f64,
    /// (wave vector, amplitude, phase)
    pub modes: Vec<(Vec<f64>, f64, f64)>,
}

impl WavePacket {
    /// Seeded random packet with carriers in the octave around `2^j0`,
    /// centred in the box of `grid`.
    pub fn random(grid: GridSpec, j0: f64, n_modes: usize, width: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = grid.dim().max(1);
        let center = vec![grid.box_len() / 2.0; grid.dim()];
        let mut modes = Vec::with_capacity(n_modes);
        for _ in 0..n_modes {
            let mag = (j0 + rng.gen_range(-0.4..0.4)).exp2();
            let mut k = vec![0.0f64; dim];
            loop {
                let mut norm = 0.0f64;
                for c in k.iter_mut() {
                    *c = rng.gen_range(-1.0..1.0);
                    norm += *c * *c;
                }
                if norm > 1e-3 {
                    let norm = norm.sqrt();
                    for c in k.iter_mut() {
                        *c *= mag / norm;
                    }
                    break;
                }
            }
            k.truncate(grid.dim().max(1));
            let amp = rng.gen_range(0.3..1.0);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            modes.push((k, amp, phase));
        }
        Self { center, width, modes }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum();
        let envelope = (-r2 / (self.width * self.width)).exp();
        let mut osc = 0.0;
        for (k, a, th) in &self.modes {
            let phase: f64 = k
                .iter()
                .zip(x.iter().zip(&self.center))
                .map(|(kc, (xc, cc))| kc * (xc - cc))
                .sum();
            osc += a * (phase + th).cos();
        }
        envelope * osc
    }

    /// The packet for `f(λ x)`: centre and width shrink, carriers grow.
    pub fn dilated(&self, lambda: f64) -> WavePacket {
        WavePacket {
            center: self.center.iter().map(|c| c / lambda).collect(),
            width: self.width / lambda,
            modes: self
                .modes
                .iter()
                .map(|(k, a, th)| (k.iter().map(|c| c * lambda).collect(), *a, *th))
                .collect(),
        }
    }

    pub fn translated(&self, shift: &[f64]) -> WavePacket {
        WavePacket {
            center: self
                .center
                .iter()
                .zip(shift)
                .map(|(c, s)| c + s)
                .collect(),
            width: self.width,
            modes: self.modes.clone(),
        }
    }

    pub fn field(&self, grid: GridSpec) -> Field {
        Field::from_fn(grid, |x| Complex64::new(self.eval(x), 0.0))
    }

    pub fn half_field(&self, grid: GridSpec) -> HalfField {
        HalfField::from_fn(grid, |x| Complex64::new(self.eval(x), 0.0))
    }
}

/// A smooth compactly supported time profile with an oscillatory carrier,
/// `a(t) = exp(-1/(1-u²)) cos(ω (t-center))` for `u = (t-center)/halfwidth`
/// inside `(-1, 1)`.
///
/// A nonzero carrier keeps the profile band-limited away from zero
/// frequency, so truncated dyadic windows capture essentially all of it.
#[derive(Debug, Clone, Copy)]
pub struct TimeBump {
    pub center: f64,
    pub halfwidth: f64,
    pub amplitude: f64,
    pub carrier: f64,
}

impl TimeBump {
    pub fn new(center: f64, halfwidth: f64) -> Self {
        Self { center, halfwidth, amplitude: 1.0, carrier: 0.0 }
    }

    pub fn with_carrier(center: f64, halfwidth: f64, carrier: f64) -> Self {
        Self { center, halfwidth, amplitude: 1.0, carrier }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.halfwidth;
        if u.abs() < 1.0 {
            self.amplitude
                * (-1.0 / (1.0 - u * u)).exp()
                * (self.carrier * (t - self.center)).cos()
        } else {
            0.0
        }
    }

    /// Profile of `a(λ² t)`.
    pub fn parabolic_dilated(&self, lambda: f64) -> TimeBump {
        let l2 = lambda * lambda;
        TimeBump {
            center: self.center / l2,
            halfwidth: self.halfwidth / l2,
            amplitude: self.amplitude,
            carrier: self.carrier * l2,
        }
    }

    pub fn translated(&self, shift: f64) -> TimeBump {
        TimeBump { center: self.center + shift, ..*self }
    }
}

/// Separable space-time boundary datum `h(t, x') = a(t) b(x')`.
#[derive(Debug, Clone)]
pub struct SeparableData {
    pub time: TimeBump,
    pub space: WavePacket,
}

impl SeparableData {
    /// Seeded family member: packet carrier near `2^j0`, bump with temporal
    /// carrier near `2^k0` supported inside `[0, t_support]`.
    pub fn random(grid: GridSpec, j0: f64, k0: f64, t_support: f64, width: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5eed));
        let center = t_support * rng.gen_range(0.35..0.65);
        let halfwidth = t_support * rng.gen_range(0.2..0.3);
        let carrier = (k0 + rng.gen_range(-0.3..0.3)).exp2();
        Self {
            time: TimeBump::with_carrier(center, halfwidth, carrier),
            space: WavePacket::random(grid, j0, 3, width, seed),
        }
    }

    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        self.time.eval(t) * self.space.eval(x)
    }

    /// `h(λ² t, λ x')`.
    pub fn parabolic_dilated(&self, lambda: f64) -> SeparableData {
        SeparableData {
            time: self.time.parabolic_dilated(lambda),
            space: self.space.dilated(lambda),
        }
    }

    pub fn time_translated(&self, shift: f64) -> SeparableData {
        SeparableData { time: self.time.translated(shift), space: self.space.clone() }
    }

    pub fn time_field(&self, tgrid: TimeGrid, grid: GridSpec) -> TimeField {
        TimeField::from_fn(tgrid, grid, |t, x| Complex64::new(self.eval(t, x), 0.0))
    }
}
