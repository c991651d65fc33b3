//! Thin 2-D FFT layer over rustfft.
//!
//! The forward transform carries the full 1/N^2 normalization so spectral
//! coefficients approximate Fourier-series coefficients of the periodic
//! function; the inverse is unnormalized. Data is row-major `N x N`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Physical -> spectral, in place, including the 1/N^2 factor.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.pass(data, true);
        transpose(data, self.n);
        self.pass(data, true);
        transpose(data, self.n);
        let scale = 1.0 / (self.n * self.n) as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }

    /// Spectral -> physical, in place, no scaling.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.pass(data, false);
        transpose(data, self.n);
        self.pass(data, false);
        transpose(data, self.n);
    }

    fn pass(&self, data: &mut [Complex64], fwd: bool) {
        let plan = if fwd { &self.forward } else { &self.inverse };
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        for row in data.chunks_exact_mut(self.n) {
            plan.process_with_scratch(row, &mut scratch);
        }
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let n = 32;
        let fft = Fft2::new(n);
        let mut data: Vec<Complex64> = (0..n * n)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), 0.0))
            .collect();
        let original = data.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(&original) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_lands_on_its_index() {
        let n = 16;
        let fft = Fft2::new(n);
        // f(x, y) = exp(i (3 x0 + 2 y0)) sampled on the unit-index lattice.
        let mut data: Vec<Complex64> = (0..n * n)
            .map(|idx| {
                let (ix, iy) = (idx % n, idx / n);
                let phase = 2.0 * std::f64::consts::PI * (3.0 * ix as f64 + 2.0 * iy as f64)
                    / n as f64;
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        fft.forward(&mut data);
        for (idx, c) in data.iter().enumerate() {
            let expect = if idx == 2 * n + 3 { 1.0 } else { 0.0 };
            assert!((c - Complex64::new(expect, 0.0)).norm() < 1e-12, "idx {idx}: {c}");
        }
    }
}
