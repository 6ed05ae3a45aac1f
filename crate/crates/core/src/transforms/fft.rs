//! Minimal 2-D FFT plumbing on square row-major buffers.
//!
//! Rows are transformed in place, the buffer is transposed, rows are
//! transformed again, and the buffer is transposed back, so the output keeps
//! the input's layout. The inverse applies the `1/N²` normalization, making
//! `inverse(forward(x)) = x` up to rounding.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

pub(crate) struct Fft2<T> {
    size: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    scratch: Vec<Complex<T>>,
    transpose_buf: Vec<Complex<T>>,
}

impl<T: Real> Fft2<T> {
    pub fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(size);
        let inv = planner.plan_fft_inverse(size);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Fft2 {
            size,
            fwd,
            inv,
            scratch: vec![Complex::new(T::zero(), T::zero()); scratch_len],
            transpose_buf: vec![Complex::new(T::zero(), T::zero()); size * size],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn transpose(&mut self, data: &mut [Complex<T>]) {
        let n = self.size;
        const BLOCK: usize = 32;
        for bi in (0..n).step_by(BLOCK) {
            for bj in (0..n).step_by(BLOCK) {
                for i in bi..(bi + BLOCK).min(n) {
                    for j in bj..(bj + BLOCK).min(n) {
                        self.transpose_buf[j * n + i] = data[i * n + j];
                    }
                }
            }
        }
        data.copy_from_slice(&self.transpose_buf);
    }

    fn pass(&mut self, data: &mut [Complex<T>], forward: bool) {
        debug_assert_eq!(data.len(), self.size * self.size);
        let plan = if forward { &self.fwd } else { &self.inv };
        for row in data.chunks_exact_mut(self.size) {
            plan.process_with_scratch(row, &mut self.scratch);
        }
    }

    pub fn forward(&mut self, data: &mut [Complex<T>]) {
        self.pass(data, true);
        self.transpose(data);
        self.pass(data, true);
        self.transpose(data);
    }

    pub fn inverse(&mut self, data: &mut [Complex<T>]) {
        self.pass(data, false);
        self.transpose(data);
        self.pass(data, false);
        self.transpose(data);
        let scale = T::one() / T::of((self.size * self.size) as f64);
        for v in data.iter_mut() {
            *v = v.scale(scale);
        }
    }
}
