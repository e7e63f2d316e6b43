//! Two-dimensional FFT on the signed index layout used by the fields.
//!
//! Fields store entries row-major over `(j1, j2)` with `j` running from
//! `-N/2` to `N/2 - 1`. The transform library wants index `j mod N`, which for
//! even `N` is a swap of the two halves along each axis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type Plan = Arc<dyn Fft<f64>>;

fn plan(n: usize, direction: FftDirection) -> Plan {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let forward = matches!(direction, FftDirection::Forward);
    let mut plans = PLANS
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    plans
        .entry((n, forward))
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

/// Swaps halves along both axes; its own inverse for even `n`.
pub(crate) fn swap_halves(n: usize, data: &[Complex64]) -> Vec<Complex64> {
    let half = n / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for p1 in 0..n {
        let s1 = (p1 + half) % n;
        for p2 in 0..n {
            out[s1 * n + (p2 + half) % n] = data[p1 * n + p2];
        }
    }
    out
}

fn transpose(n: usize, data: &[Complex64], out: &mut [Complex64]) {
    for a in 0..n {
        for b in 0..n {
            out[b * n + a] = data[a * n + b];
        }
    }
}

/// Unnormalized 2-D DFT in standard layout, in place.
pub(crate) fn fft2(n: usize, data: &mut [Complex64], direction: FftDirection) {
    debug_assert_eq!(data.len(), n * n);
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
    let mut t = vec![Complex64::new(0.0, 0.0); n * n];
    transpose(n, data, &mut t);
    fft.process_with_scratch(&mut t, &mut scratch);
    transpose(n, &t, data);
}

/// Signed-layout forward transform: `c_j = sum_n v_n exp(-2 pi i j.n / N)`.
pub(crate) fn forward_signed(n: usize, values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = swap_halves(n, values);
    fft2(n, &mut buf, FftDirection::Forward);
    swap_halves(n, &buf)
}

/// Signed-layout inverse transform without the `1/N^2` factor.
pub(crate) fn inverse_signed(n: usize, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = swap_halves(n, coeffs);
    fft2(n, &mut buf, FftDirection::Inverse);
    swap_halves(n, &buf)
}
