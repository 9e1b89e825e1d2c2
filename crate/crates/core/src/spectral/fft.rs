//! Square-grid Fourier transforms used by the periodic evolutions.

use num::complex::Complex64;
use rustfft::FftPlanner;

/// In-place 2D FFT over a row-major square array. The inverse variant does
/// not apply the 1/n² factor; callers fold it into their own scaling.
pub(super) fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n * n);
    let mut planner = FftPlanner::new();
    let fft =
        if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose(data, n);
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose(data, n);
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// `(−1)^k`: translates between the DFT's 0-based indexing and a spatial
/// grid whose first sample sits at −L (equivalently, between the FFT
/// frequency ordering and the symmetric continuum frequency grid).
#[inline]
pub(super) fn parity_sign(k: usize) -> f64 {
    if k & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_then_inverse_is_the_identity_up_to_n_squared() {
        let n = 8;
        let mut data: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i % 7) as f64 - 3.0, (i % 5) as f64))
            .collect();
        let orig = data.clone();
        fft2(&mut data, n, false);
        fft2(&mut data, n, true);
        let scale = (n * n) as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_transforms_to_a_unit_column() {
        // g_j = e^{2 pi i j·(1,2)/n} has DFT concentrated at k=(1,2)
        let n = 8;
        let mut data: Vec<Complex64> = (0..n * n)
            .map(|i| {
                let (j1, j2) = (i / n, i % n);
                Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * (j1 as f64 + 2.0 * j2 as f64) / n as f64,
                )
            })
            .collect();
        fft2(&mut data, n, false); // the forward kernel e^{-i...} picks out the mode
        for (i, v) in data.iter().enumerate() {
            let expect = if i == n + 2 { (n * n) as f64 } else { 0.0 };
            assert!((v - Complex64::new(expect, 0.0)).norm() < 1e-9, "index {i}: {v}");
        }
    }
}
