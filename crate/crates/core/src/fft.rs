//! Multi-axis FFT helpers over `ndarray` storage, backed by `rustfft`.

use ndarray::{ArrayD, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// Forward DFT along every axis, unnormalized:
/// `F[k] = sum_i f[i] exp(-2πi k·i / N)`.
pub fn dft_all_axes(data: &mut ArrayD<Complex64>) {
    transform(data, false, &(0..data.ndim()).collect::<Vec<_>>());
}

/// Inverse DFT along every axis, normalized so that it undoes
/// `dft_all_axes` exactly (division by N per axis).
pub fn idft_all_axes(data: &mut ArrayD<Complex64>) {
    transform(data, true, &(0..data.ndim()).collect::<Vec<_>>());
}

/// Forward DFT along a single axis.
pub fn dft_axis(data: &mut ArrayD<Complex64>, axis: usize) {
    transform(data, false, &[axis]);
}

/// Normalized inverse DFT along a single axis.
pub fn idft_axis(data: &mut ArrayD<Complex64>, axis: usize) {
    transform(data, true, &[axis]);
}

fn transform(data: &mut ArrayD<Complex64>, inverse: bool, axes: &[usize]) {
    for &ax in axes {
        let len = data.len_of(Axis(ax));
        if len <= 1 {
            continue;
        }
        let fft = plan(len, inverse);
        let scale = if inverse { 1.0 / len as f64 } else { 1.0 };
        let mut scratch = vec![Complex64::default(); len];
        for mut lane in data.lanes_mut(Axis(ax)) {
            for (s, v) in scratch.iter_mut().zip(lane.iter()) {
                *s = *v;
            }
            fft.process(&mut scratch);
            for (v, s) in lane.iter_mut().zip(scratch.iter()) {
                *v = s * scale;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::IxDyn;

    #[test]
    fn round_trip_identity() {
        let shape = IxDyn(&[8, 4]);
        let mut a = ArrayD::from_shape_fn(shape.clone(), |ix| {
            Complex64::new((ix[0] * 7 + ix[1]) as f64, (ix[1] * 3) as f64 - 1.0)
        });
        let orig = a.clone();
        dft_all_axes(&mut a);
        idft_all_axes(&mut a);
        for (x, y) in a.iter().zip(orig.iter()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_spectrum() {
        let n = 16;
        let mut a = ArrayD::from_shape_fn(IxDyn(&[n]), |ix| {
            let x = ix[0] as f64 / n as f64;
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 3.0 * x)
        });
        dft_all_axes(&mut a);
        for i in 0..n {
            let expect = if i == 3 { n as f64 } else { 0.0 };
            assert!((a[[i]] - Complex64::new(expect, 0.0)).norm() < 1e-9);
        }
    }
}
