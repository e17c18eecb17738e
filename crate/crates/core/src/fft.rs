//! Square 2D FFT helpers over rustfft with a shared plan cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Plans {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

/// Forward and inverse plans of length `len`, shared process-wide.
pub fn plans(len: usize) -> Plans {
    static CACHE: OnceLock<Mutex<HashMap<usize, Plans>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(len)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Plans {
                forward: planner.plan_fft_forward(len),
                inverse: planner.plan_fft_inverse(len),
            }
        })
        .clone()
}

/// Out-of-place transpose of a square `n x n` row-major buffer.
pub fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const B: usize = 16;
    for rb in (0..n).step_by(B) {
        for cb in (0..n).step_by(B) {
            for r in rb..(rb + B).min(n) {
                for c in cb..(cb + B).min(n) {
                    dst[c * n + r] = src[r * n + c];
                }
            }
        }
    }
}

/// Unnormalized in-place 2D transform of a square row-major buffer.
pub fn fft2(buf: &mut [Complex64], n: usize, inverse: bool) {
    let p = plans(n);
    let f = if inverse { &p.inverse } else { &p.forward };
    let mut scratch = vec![Complex64::new(0.0, 0.0); f.get_inplace_scratch_len()];
    f.process_with_scratch(buf, &mut scratch);
    let mut t = vec![Complex64::new(0.0, 0.0); n * n];
    transpose(buf, &mut t, n);
    f.process_with_scratch(&mut t, &mut scratch);
    transpose(&t, buf, n);
}

/// Signed frequency index of FFT bin `k` on an `n`-point transform.
#[inline]
pub fn signed_bin(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}
