//! Type-I discrete sine transform, the eigenbasis of the Dirichlet Laplacian.
//!
//! `forward` computes the unnormalised transform
//! `X[k] = sum_j x[j] sin(pi (j+1)(k+1) / (n+1))`; applying it twice gives
//! `(n+1)/2` times the identity, which `inverse` divides out.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Above this size the direct table would get large, so the FFT path is used
/// regardless of the factorisation of `n + 1`.
const DIRECT_LIMIT: usize = 1024;

#[derive(Clone)]
enum Backend {
    Fast(Arc<dyn Fft<f64>>),
    Direct(Arc<Vec<f64>>),
}

#[derive(Clone)]
pub struct SineTransform {
    n: usize,
    backend: Backend,
}

impl fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SineTransform")
            .field("n", &self.n)
            .field("fast", &self.is_fast())
            .finish()
    }
}

fn is_smooth(mut m: usize) -> bool {
    for p in [2, 3, 5, 7] {
        while m.is_multiple_of(p) {
            m /= p;
        }
    }
    m == 1
}

impl SineTransform {
    /// Picks the FFT path when `n + 1` factors into 2, 3, 5 and 7, and the
    /// direct sine sum otherwise.
    pub fn new(n: usize) -> SineTransform {
        if is_smooth(n + 1) || n > DIRECT_LIMIT {
            SineTransform::fast(n)
        } else {
            SineTransform::direct(n)
        }
    }

    pub fn fast(n: usize) -> SineTransform {
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        SineTransform {
            n,
            backend: Backend::Fast(fft),
        }
    }

    pub fn direct(n: usize) -> SineTransform {
        let period = 2 * (n + 1);
        let scale = std::f64::consts::PI / (n + 1) as f64;
        let mut table = Vec::with_capacity(n * n);
        for k in 1..=n {
            for j in 1..=n {
                // reduce the argument before scaling so large products stay accurate
                let m = (j * k) % period;
                table.push((m as f64 * scale).sin());
            }
        }
        SineTransform {
            n,
            backend: Backend::Direct(Arc::new(table)),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_fast(&self) -> bool {
        matches!(self.backend, Backend::Fast(_))
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.forward_in_place(&mut out);
        out
    }

    pub fn inverse(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.inverse_in_place(&mut out);
        out
    }

    pub fn forward_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        match &self.backend {
            Backend::Fast(fft) => {
                let n = self.n;
                let mut buf = vec![Complex::new(0.0, 0.0); 2 * (n + 1)];
                for (j, &v) in x.iter().enumerate() {
                    buf[j + 1].re = v;
                    buf[2 * (n + 1) - (j + 1)].re = -v;
                }
                fft.process(&mut buf);
                for (k, out) in x.iter_mut().enumerate() {
                    *out = -0.5 * buf[k + 1].im;
                }
            }
            Backend::Direct(table) => {
                let n = self.n;
                let input = x.to_vec();
                for (k, out) in x.iter_mut().enumerate() {
                    let row = &table[k * n..(k + 1) * n];
                    *out = row.iter().zip(&input).map(|(s, v)| s * v).sum();
                }
            }
        }
    }

    pub fn inverse_in_place(&self, x: &mut [f64]) {
        self.forward_in_place(x);
        let scale = 2.0 / (self.n + 1) as f64;
        for v in x.iter_mut() {
            *v *= scale;
        }
    }

    /// Forward transform along both axes of a row-major `n x n` array.
    pub fn forward_2d(&self, data: &mut [f64]) {
        let n = self.n;
        assert_eq!(data.len(), n * n);
        for row in data.chunks_mut(n) {
            self.forward_in_place(row);
        }
        let mut column = vec![0.0; n];
        for ix in 0..n {
            for iy in 0..n {
                column[iy] = data[iy * n + ix];
            }
            self.forward_in_place(&mut column);
            for iy in 0..n {
                data[iy * n + ix] = column[iy];
            }
        }
    }

    pub fn inverse_2d(&self, data: &mut [f64]) {
        self.forward_2d(data);
        let scale = (2.0 / (self.n + 1) as f64).powi(2);
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}
