//! Boundary potentials and Green functions for the half-space heat problem,
//! evaluated as Fourier multipliers with dyadic time/space cut-offs.
//!
//! For the Fourier variables `(τ, ξ')` dual to `(t, x')` and the principal
//! square root `w = √(iτ + |ξ'|²)`, the multiplier of each kind is
//!
//! - Dirichlet potential:  `iτ e^{-wη}`
//! - Neumann potential:    `-(iτ/w) e^{-wη}`
//! - Dirichlet Green fn:   `e^{-wη}`
//! - Neumann Green fn:     `-(1/w) e^{-wη}`
//! - oblique potential:    `iτ / (i b'·ξ' - b_n w) · e^{-wη}`
//!
//! The dyadically localized kernel of indices `(k, j)` is the inverse
//! transform of the multiplier times `ψ̂(2^{-k}τ) φ̂(2^{-j}|ξ'|)`, an
//! absolutely convergent oscillatory integral over the compact shell
//! `|τ| ∈ [2^{k-1}, 2^{k+1}]`, `|ξ'| ∈ [2^{j-1}, 2^{j+1}]`. It is computed
//! by tensor Gauss-Legendre quadrature whose nodes scale with `(k, j)`, so
//! dyadic rescaling identities map node to node.

use crate::filterbank::{pow2, DyadicProfile};
use crate::quad;
use ndarray::Array2;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("boundary-normal coordinate must be positive, got {0}")]
    EtaNotPositive(f64),
    #[error("oblique boundary vector needs positive normal component, got {0}")]
    ObliqueNormalNotPositive(f64),
    #[error("multiplier is singular at (τ, ξ') = (0, 0) for this kind")]
    SingularOrigin,
    #[error("quadrature did not converge: relative change {estimate:.3e} above tolerance {tol:.3e}")]
    QuadratureNotConverged { estimate: f64, tol: f64 },
    #[error("integration box too small: tail estimate is {tail_frac:.3e} of the value")]
    TailTooLarge { tail_frac: f64 },
    #[error("kernel evaluation supports ambient dimension 2 or 3, got {0}")]
    UnsupportedDimension(usize),
    #[error("η-smoothing index required for this operation")]
    MissingSmoothingIndex,
}

/// Which boundary kernel to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    Dirichlet,
    Neumann,
    /// Oblique condition `b·∇u = h` with tangential part `b'` and normal
    /// component `b_n > 0`.
    Oblique { b_tangential: Vec<f64>, b_normal: f64 },
    GreenD,
    GreenN,
}

impl KernelKind {
    fn radial(&self) -> bool {
        !matches!(self, KernelKind::Oblique { .. })
    }

    fn validate(&self) -> Result<(), KernelError> {
        if let KernelKind::Oblique { b_normal, .. } = self {
            if !(*b_normal > 0.0) {
                return Err(KernelError::ObliqueNormalNotPositive(*b_normal));
            }
        }
        Ok(())
    }
}

/// A dyadically localized kernel evaluation request.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Ambient dimension `n` (transverse `x'` has `n - 1` components).
    pub dim: usize,
    /// Temporal dyadic index.
    pub k: i32,
    /// Spatial dyadic index.
    pub j: i32,
    /// Boundary-normal coordinate, `> 0`.
    pub eta: f64,
    /// η-smoothing index for the `φ_m *_η` convolved kernel.
    pub smoothing_m: Option<i32>,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, dim: usize, k: i32, j: i32, eta: f64) -> Self {
        Self { kind, dim, k, j, eta, smoothing_m: None }
    }

    pub fn smoothed(mut self, m: i32) -> Self {
        self.smoothing_m = Some(m);
        self
    }

    fn validate(&self) -> Result<(), KernelError> {
        self.kind.validate()?;
        if !(self.eta > 0.0) {
            return Err(KernelError::EtaNotPositive(self.eta));
        }
        if self.dim < 2 || self.dim > 3 {
            return Err(KernelError::UnsupportedDimension(self.dim));
        }
        Ok(())
    }
}

/// Principal branch of `√(iτ + |ξ'|²)`.
///
/// The argument of `iτ + ρ²` lies in `[-π/2, π/2]`, so
/// `Re w ≥ (τ² + ρ⁴)^{1/4} · √2/2 ≥ 0` always.
pub fn complex_root(tau: f64, rho: f64) -> Complex64 {
    let w = Complex64::new(rho * rho, tau).sqrt();
    debug_assert!(
        w.re >= (tau * tau + rho.powi(4)).powf(0.25) * std::f64::consts::FRAC_1_SQRT_2 * (1.0 - 1e-12),
        "principal branch positivity violated at tau={tau}, rho={rho}"
    );
    w
}

/// Multiplier value of a radial kind at `(τ, |ξ'|, η)`.
fn radial_symbol(kind: &KernelKind, tau: f64, rho: f64, eta: f64) -> Complex64 {
    let w = complex_root(tau, rho);
    let decay = (-w * eta).exp();
    let itau = Complex64::new(0.0, tau);
    match kind {
        KernelKind::Dirichlet => itau * decay,
        KernelKind::Neumann => -(itau / w) * decay,
        KernelKind::GreenD => decay,
        KernelKind::GreenN => -decay / w,
        KernelKind::Oblique { .. } => unreachable!("oblique symbol needs the full ξ' vector"),
    }
}

fn oblique_symbol(b_t: &[f64], b_n: f64, tau: f64, xi: &[f64], eta: f64) -> Complex64 {
    let rho = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
    let w = complex_root(tau, rho);
    let dot: f64 = b_t.iter().zip(xi).map(|(a, b)| a * b).sum();
    let denom = Complex64::new(0.0, dot) - w * b_n;
    Complex64::new(0.0, tau) / denom * (-w * eta).exp()
}

/// The Fourier multiplier of `kind` at frequency `(τ, ξ')` and height `η`.
pub fn symbol(kind: &KernelKind, tau: f64, xi: &[f64], eta: f64) -> Result<Complex64, KernelError> {
    kind.validate()?;
    if !(eta > 0.0) {
        return Err(KernelError::EtaNotPositive(eta));
    }
    let rho = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
    if tau == 0.0 && rho == 0.0 {
        match kind {
            KernelKind::Dirichlet | KernelKind::GreenD => {}
            _ => return Err(KernelError::SingularOrigin),
        }
    }
    Ok(match kind {
        KernelKind::Oblique { b_tangential, b_normal } => {
            oblique_symbol(b_tangential, *b_normal, tau, xi, eta)
        }
        _ => radial_symbol(kind, tau, rho, eta),
    })
}

/// Quadrature resolution knobs for kernel evaluation.
#[derive(Debug, Clone, Copy)]
pub struct QuadParams {
    /// Gauss-Legendre nodes per octave on each spectral axis.
    pub nodes_per_octave: usize,
    /// Composite panels of the transverse integral per unit of `2^{-j}`.
    pub x_panels_per_unit: usize,
    /// Default half-width of the transverse box in units of `2^{-j}`.
    pub box_units: f64,
    /// Run the coarse/fine comparison and fail above `rel_tol`.
    pub richardson: bool,
    pub rel_tol: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self {
            nodes_per_octave: 64,
            x_panels_per_unit: 3,
            box_units: 40.0,
            richardson: true,
            rel_tol: 1e-3,
        }
    }
}

// J₀ lookup: midpoint-rule values of (1/π)∫₀^π cos(z sin θ) dθ on a fine
// grid, 4-point Lagrange interpolation in between.
struct J0Table {
    step: f64,
    values: Vec<f64>,
}

impl J0Table {
    fn build(zmax: f64) -> Self {
        let step = 0.01;
        let len = (zmax / step).ceil() as usize + 4;
        let ntheta = 256;
        let mut values = Vec::with_capacity(len);
        let thetas: Vec<f64> = (0..ntheta)
            .map(|i| std::f64::consts::PI * (i as f64 + 0.5) / ntheta as f64)
            .collect();
        for i in 0..len {
            let z = i as f64 * step;
            let mut acc = 0.0;
            for th in &thetas {
                acc += (z * th.sin()).cos();
            }
            values.push(acc / ntheta as f64);
        }
        Self { step, values }
    }

    fn eval(&self, z: f64) -> f64 {
        let z = z.abs();
        let u = z / self.step;
        let i = (u.floor() as usize).clamp(1, self.values.len() - 3);
        let t = u - i as f64;
        // 4-point Lagrange on points i-1, i, i+1, i+2
        let (a, b, c, d) = (
            self.values[i - 1],
            self.values[i],
            self.values[i + 1],
            self.values[i + 2],
        );
        let t2 = t * t;
        let t3 = t2 * t;
        -a * (t3 - 3.0 * t2 + 2.0 * t) / 6.0 + b * (t3 - 2.0 * t2 - t + 2.0) / 2.0
            - c * (t3 - t2 - 2.0 * t) / 2.0
            + d * (t3 - t) / 6.0
    }
}

fn j0_table(zmax: f64) -> std::sync::Arc<J0Table> {
    static CACHE: OnceLock<Mutex<HashMap<u64, std::sync::Arc<J0Table>>>> = OnceLock::new();
    let key = zmax.ceil() as u64;
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("j0 cache poisoned");
    guard
        .entry(key)
        .or_insert_with(|| std::sync::Arc::new(J0Table::build(key as f64 + 1.0)))
        .clone()
}

/// How the `e^{-wη}` factor enters: directly, or convolved in η with `φ_m`.
#[derive(Debug, Clone, Copy)]
enum EtaEnvelope {
    Sharp,
    Smoothed { m: i32, route: SmoothingRoute },
}

/// Two independent realisations of the η-convolution `(φ_m *_η e^{-wθ})(η)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothingRoute {
    /// Fourier side: `(1/2π) ∫ φ̂(2^{-m}|ν|) e^{iνη} / (w + iν) dν`.
    Fourier,
    /// Direct quadrature of `∫_0^∞ φ_m(η - θ) e^{-wθ} dθ`.
    Direct,
}

fn smoothed_envelope(
    profile: &DyadicProfile,
    w: Complex64,
    m: i32,
    eta: f64,
    route: SmoothingRoute,
    nodes: usize,
) -> Complex64 {
    match route {
        SmoothingRoute::Fourier => {
            let (nu, wt) = quad::gauss_legendre_on(nodes, pow2(m - 1), pow2(m + 1));
            let mut acc = Complex64::default();
            for (n, q) in nu.iter().zip(&wt) {
                let bump = profile.phi_m(m, *n);
                for sign in [1.0f64, -1.0] {
                    let nv = sign * n;
                    let phase = Complex64::from_polar(1.0, nv * eta);
                    acc += q * bump * phase / (w + Complex64::new(0.0, nv));
                }
            }
            acc / (2.0 * std::f64::consts::PI)
        }
        SmoothingRoute::Direct => {
            // support of φ_m(η - θ): |η - θ| ≤ U 2^{-m}
            let u_cut = 300.0 * pow2(-m);
            let lo = (eta - u_cut).max(0.0);
            let hi = eta + u_cut;
            let oscillations = (w.im.abs() * (hi - lo)) / std::f64::consts::TAU;
            let panels = (oscillations.ceil() as usize * 2 + 24).min(4000);
            let (th, wt) = quad::composite_gauss(8, panels, lo, hi);
            let mut acc = Complex64::default();
            for (t, q) in th.iter().zip(&wt) {
                acc += q * profile.phi_physical_m(m, eta - t) * (-w * t).exp();
            }
            acc
        }
    }
}

/// Evaluator for localized kernels over a fixed profile and resolution.
pub struct KernelEvaluator<'a> {
    profile: &'a DyadicProfile,
    params: QuadParams,
}

impl<'a> KernelEvaluator<'a> {
    pub fn new(profile: &'a DyadicProfile, params: QuadParams) -> Self {
        Self { profile, params }
    }

    pub fn params(&self) -> &QuadParams {
        &self.params
    }

    fn envelope(&self, spec: &KernelSpec, route: SmoothingRoute) -> EtaEnvelope {
        match spec.smoothing_m {
            None => EtaEnvelope::Sharp,
            Some(m) => EtaEnvelope::Smoothed { m, route },
        }
    }

    /// Kernel values at the tensor of `times` × transverse points.
    ///
    /// Points are given by their coordinates in `R^{n-1}`. Radial kinds only
    /// see the point radius; the oblique kind uses the full vector.
    pub fn eval_points(
        &self,
        spec: &KernelSpec,
        times: &[f64],
        points: &[Vec<f64>],
    ) -> Result<Array2<Complex64>, KernelError> {
        spec.validate()?;
        self.eval_points_at(spec, times, points, self.params, SmoothingRoute::Fourier)
    }

    /// As `eval_points` with an explicit η-smoothing route (smoke tests
    /// compare the two).
    pub fn eval_points_with_route(
        &self,
        spec: &KernelSpec,
        times: &[f64],
        points: &[Vec<f64>],
        route: SmoothingRoute,
    ) -> Result<Array2<Complex64>, KernelError> {
        spec.validate()?;
        self.eval_points_at(spec, times, points, self.params, route)
    }

    fn eval_points_at(
        &self,
        spec: &KernelSpec,
        times: &[f64],
        points: &[Vec<f64>],
        params: QuadParams,
        route: SmoothingRoute,
    ) -> Result<Array2<Complex64>, KernelError> {
        let d = spec.dim - 1;
        if spec.kind.radial() {
            let radii: Vec<f64> = points
                .iter()
                .map(|p| p.iter().map(|c| c * c).sum::<f64>().sqrt())
                .collect();
            self.eval_radial(spec, times, &radii, params, route)
        } else if d == 1 {
            self.eval_oblique_1d(spec, times, points, params, route)
        } else {
            self.eval_oblique_2d(spec, times, points, params, route)
        }
    }

    /// Shared spectral nodes: Gauss-Legendre on `[1/2, 2]`, scaled by `2^k`
    /// (resp. `2^j`). Scale covariance makes the dyadic rescaling identities
    /// hold node-to-node.
    fn shell_nodes(&self, n_oct: usize, e: i32) -> (Vec<f64>, Vec<f64>) {
        let (x, w) = quad::gauss_legendre_on(2 * n_oct, 0.5, 2.0);
        let s = pow2(e);
        (
            x.iter().map(|v| v * s).collect(),
            w.iter().map(|v| v * s).collect(),
        )
    }

    fn eval_radial(
        &self,
        spec: &KernelSpec,
        times: &[f64],
        radii: &[f64],
        params: QuadParams,
        route: SmoothingRoute,
    ) -> Result<Array2<Complex64>, KernelError> {
        let d = spec.dim - 1;
        let (taus, tau_w) = self.shell_nodes(params.nodes_per_octave, spec.k);
        let (rs, r_w) = self.shell_nodes(params.nodes_per_octave, spec.j);
        let envelope = self.envelope(spec, route);
        let env_nodes = 2 * params.nodes_per_octave;

        // factor[sign_tau][ti][ri]
        let nt = taus.len();
        let nr = rs.len();
        let mut factor = vec![Complex64::default(); 2 * nt * nr];
        for (si, sign) in [1.0f64, -1.0].into_iter().enumerate() {
            for (ti, tau) in taus.iter().enumerate() {
                let tau = sign * tau;
                let psi = self.profile.phi_m(spec.k, tau.abs());
                for (ri, r) in rs.iter().enumerate() {
                    let phi = self.profile.phi_m(spec.j, *r);
                    let w = complex_root(tau, *r);
                    let env = match envelope {
                        EtaEnvelope::Sharp => (-w * spec.eta).exp(),
                        EtaEnvelope::Smoothed { m, route } => {
                            smoothed_envelope(self.profile, w, m, spec.eta, route, env_nodes)
                        }
                    };
                    let pref = match spec.kind {
                        KernelKind::Dirichlet => Complex64::new(0.0, tau),
                        KernelKind::Neumann => -Complex64::new(0.0, tau) / w,
                        KernelKind::GreenD => Complex64::new(1.0, 0.0),
                        KernelKind::GreenN => -Complex64::new(1.0, 0.0) / w,
                        KernelKind::Oblique { .. } => unreachable!(),
                    };
                    factor[(si * nt + ti) * nr + ri] = pref * env * psi * phi * tau_w[ti] * r_w[ri];
                }
            }
        }

        // transverse transform: A[sign, ti, pi]
        let np = radii.len();
        let mut trig = vec![0.0f64; nr * np];
        if d == 1 {
            for (ri, r) in rs.iter().enumerate() {
                for (pi, rho) in radii.iter().enumerate() {
                    trig[ri * np + pi] = 2.0 * (r * rho).cos();
                }
            }
        } else {
            let zmax = rs.last().copied().unwrap_or(0.0)
                * radii.iter().cloned().fold(0.0f64, f64::max);
            let table = j0_table(zmax + 1.0);
            for (ri, r) in rs.iter().enumerate() {
                for (pi, rho) in radii.iter().enumerate() {
                    trig[ri * np + pi] =
                        std::f64::consts::TAU * r * table.eval(r * rho);
                }
            }
        }
        let mut a = vec![Complex64::default(); 2 * nt * np];
        for row in 0..2 * nt {
            let f = &factor[row * nr..(row + 1) * nr];
            let out = &mut a[row * np..(row + 1) * np];
            for (ri, fv) in f.iter().enumerate() {
                if fv.norm_sqr() == 0.0 {
                    continue;
                }
                let tr = &trig[ri * np..(ri + 1) * np];
                for (o, t) in out.iter_mut().zip(tr) {
                    *o += fv * t;
                }
            }
        }

        // time phases and assembly
        let c = (2.0 * std::f64::consts::PI).powf(-(spec.dim as f64 + 1.0) / 2.0);
        let mut out = Array2::<Complex64>::default((times.len(), np));
        for (wi, t) in times.iter().enumerate() {
            for (si, sign) in [1.0f64, -1.0].into_iter().enumerate() {
                for (ti, tau) in taus.iter().enumerate() {
                    let phase = Complex64::from_polar(1.0, sign * tau * t);
                    let row = &a[(si * nt + ti) * np..(si * nt + ti + 1) * np];
                    for (pi, av) in row.iter().enumerate() {
                        out[(wi, pi)] += phase * av * c;
                    }
                }
            }
        }
        Ok(out)
    }

    fn eval_oblique_1d(
        &self,
        spec: &KernelSpec,
        times: &[f64],
        points: &[Vec<f64>],
        params: QuadParams,
        route: SmoothingRoute,
    ) -> Result<Array2<Complex64>, KernelError> {
        let (b_t, b_n) = match &spec.kind {
            KernelKind::Oblique { b_tangential, b_normal } => (b_tangential.clone(), *b_normal),
            _ => unreachable!(),
        };
        let (taus, tau_w) = self.shell_nodes(params.nodes_per_octave, spec.k);
        let (rs, r_w) = self.shell_nodes(params.nodes_per_octave, spec.j);
        let env_nodes = 2 * params.nodes_per_octave;
        let c = (2.0 * std::f64::consts::PI).powf(-(spec.dim as f64 + 1.0) / 2.0);
        let mut out = Array2::<Complex64>::default((times.len(), points.len()));
        for (pi, p) in points.iter().enumerate() {
            let x = p[0];
            for st in [1.0f64, -1.0] {
                for (ti, tau0) in taus.iter().enumerate() {
                    let tau = st * tau0;
                    let psi = self.profile.phi_m(spec.k, tau.abs());
                    let mut inner = Complex64::default();
                    for sx in [1.0f64, -1.0] {
                        for (ri, r0) in rs.iter().enumerate() {
                            let xi = sx * r0;
                            let phi = self.profile.phi_m(spec.j, xi.abs());
                            let w = complex_root(tau, xi.abs());
                            let env = match self.envelope(spec, route) {
                                EtaEnvelope::Sharp => (-w * spec.eta).exp(),
                                EtaEnvelope::Smoothed { m, route } => smoothed_envelope(
                                    self.profile,
                                    w,
                                    m,
                                    spec.eta,
                                    route,
                                    env_nodes,
                                ),
                            };
                            let denom = Complex64::new(0.0, b_t[0] * xi) - w * b_n;
                            let pref = Complex64::new(0.0, tau) / denom;
                            inner += pref * env * psi * phi * tau_w[ti] * r_w[ri]
                                * Complex64::from_polar(1.0, x * xi);
                        }
                    }
                    for (wi, t) in times.iter().enumerate() {
                        out[(wi, pi)] += inner * Complex64::from_polar(1.0, tau * t) * c;
                    }
                }
            }
        }
        Ok(out)
    }

    fn eval_oblique_2d(
        &self,
        spec: &KernelSpec,
        times: &[f64],
        points: &[Vec<f64>],
        params: QuadParams,
        route: SmoothingRoute,
    ) -> Result<Array2<Complex64>, KernelError> {
        let (b_t, b_n) = match &spec.kind {
            KernelKind::Oblique { b_tangential, b_normal } => (b_tangential.clone(), *b_normal),
            _ => unreachable!(),
        };
        let (taus, tau_w) = self.shell_nodes(params.nodes_per_octave, spec.k);
        let (rs, r_w) = self.shell_nodes(params.nodes_per_octave, spec.j);
        let ntheta = 64;
        let env_nodes = 2 * params.nodes_per_octave;
        let c = (2.0 * std::f64::consts::PI).powf(-(spec.dim as f64 + 1.0) / 2.0);
        let dtheta = std::f64::consts::TAU / ntheta as f64;
        let mut out = Array2::<Complex64>::default((times.len(), points.len()));
        for st in [1.0f64, -1.0] {
            for (ti, tau0) in taus.iter().enumerate() {
                let tau = st * tau0;
                let psi = self.profile.phi_m(spec.k, tau.abs());
                for (ri, r) in rs.iter().enumerate() {
                    let phi = self.profile.phi_m(spec.j, *r);
                    let w = complex_root(tau, *r);
                    let env = match self.envelope(spec, route) {
                        EtaEnvelope::Sharp => (-w * spec.eta).exp(),
                        EtaEnvelope::Smoothed { m, route } => {
                            smoothed_envelope(self.profile, w, m, spec.eta, route, env_nodes)
                        }
                    };
                    for it in 0..ntheta {
                        let th = dtheta * it as f64;
                        let xi = [r * th.cos(), r * th.sin()];
                        let dot = b_t[0] * xi[0] + b_t.get(1).copied().unwrap_or(0.0) * xi[1];
                        let denom = Complex64::new(0.0, dot) - w * b_n;
                        let base = Complex64::new(0.0, tau) / denom
                            * env
                            * psi
                            * phi
                            * tau_w[ti]
                            * (r_w[ri] * r * dtheta);
                        for (pi, p) in points.iter().enumerate() {
                            let ph = xi[0] * p[0] + xi[1] * p[1];
                            let v = base * Complex64::from_polar(1.0, ph);
                            for (wi, t) in times.iter().enumerate() {
                                out[(wi, pi)] +=
                                    v * Complex64::from_polar(1.0, tau * t) * c;
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Transverse quadrature grid for `L¹` norms: composite Gauss panels on
    /// `[0, R]` with spacing tied to the kernel's `2^{-j}` length scale.
    fn l1_grid(&self, j: i32, box_r: f64, panels_per_unit: usize) -> (Vec<f64>, Vec<f64>) {
        let units = box_r * pow2(j);
        let panels = ((units * panels_per_unit as f64).ceil() as usize).max(8);
        quad::composite_gauss(8, panels, 0.0, box_r)
    }

    fn l1_value(
        &self,
        spec: &KernelSpec,
        t: f64,
        box_r: f64,
        params: QuadParams,
        route: SmoothingRoute,
    ) -> Result<f64, KernelError> {
        let d = spec.dim - 1;
        let (rho, wts) = self.l1_grid(spec.j, box_r, params.x_panels_per_unit);
        let vals = self.eval_radial(spec, &[t], &rho, params, route)?;
        let mut acc = 0.0;
        for (pi, w) in wts.iter().enumerate() {
            let m = vals[(0, pi)].norm();
            acc += if d == 1 {
                2.0 * w * m
            } else {
                std::f64::consts::TAU * w * rho[pi] * m
            };
        }
        Ok(acc)
    }

    /// `L¹` value over the box of radius `box_r` at the evaluator's
    /// resolution, with no convergence or tail checks.
    pub fn l1_plain(
        &self,
        spec: &KernelSpec,
        t: f64,
        box_r: f64,
    ) -> Result<f64, KernelError> {
        spec.validate()?;
        if !spec.kind.radial() {
            return Err(KernelError::UnsupportedDimension(spec.dim));
        }
        self.l1_value(spec, t, box_r, self.params, SmoothingRoute::Fourier)
    }

    /// `L¹` norm over the transverse box of radius `box_r` (default when
    /// `None`: `box_units · 2^{-j}`), with a Richardson resolution check and
    /// a tail estimate from doubling the box.
    ///
    /// The wide-box evaluation scales its spectral node count with the box so
    /// the transverse oscillation stays resolved.
    pub fn l1_norm(
        &self,
        spec: &KernelSpec,
        t: f64,
        box_r: Option<f64>,
    ) -> Result<L1Outcome, KernelError> {
        self.l1_norm_with_route(spec, t, box_r, SmoothingRoute::Fourier)
    }

    pub fn l1_norm_with_route(
        &self,
        spec: &KernelSpec,
        t: f64,
        box_r: Option<f64>,
        route: SmoothingRoute,
    ) -> Result<L1Outcome, KernelError> {
        spec.validate()?;
        if !spec.kind.radial() {
            return Err(KernelError::UnsupportedDimension(spec.dim));
        }
        let box_r = box_r.unwrap_or(self.params.box_units * pow2(-spec.j));
        let value = self.l1_value(spec, t, box_r, self.params, route)?;
        let mut quad_err = 0.0;
        let mut refined = value;
        if self.params.richardson {
            let fine = QuadParams {
                nodes_per_octave: self.params.nodes_per_octave * 3 / 2,
                x_panels_per_unit: self.params.x_panels_per_unit * 2,
                ..self.params
            };
            refined = self.l1_value(spec, t, box_r, fine, route)?;
            quad_err = (refined - value).abs() / refined.max(f64::MIN_POSITIVE);
            if quad_err > self.params.rel_tol {
                return Err(KernelError::QuadratureNotConverged {
                    estimate: quad_err,
                    tol: self.params.rel_tol,
                });
            }
        }
        let wide_params = QuadParams {
            nodes_per_octave: self.params.nodes_per_octave * 2,
            ..self.params
        };
        let wide = self.l1_value(spec, t, 2.0 * box_r, wide_params, route)?;
        let tail = (wide - value).abs() / value.max(f64::MIN_POSITIVE);
        if tail > 0.05 {
            return Err(KernelError::TailTooLarge { tail_frac: tail });
        }
        Ok(L1Outcome { value: refined, quad_error: quad_err, tail_estimate: tail })
    }
}

/// `L¹` norm with its quadrature diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct L1Outcome {
    pub value: f64,
    /// Relative difference against the half-resolution rule.
    pub quad_error: f64,
    /// Relative change when the integration box is doubled.
    pub tail_estimate: f64,
}
