//! Windowed MDCT with 50% overlap and time-domain alias cancellation.
//!
//! The forward transform maps a 2N-sample block to N coefficients:
//!
//! ```text
//! X[k] = sum_{n=0}^{2N-1} w[n] x[n] cos(pi/N (n + 1/2 + N/2)(k + 1/2))
//! ```
//!
//! with the sine window `w[n] = sin(pi/(2N) (n + 1/2))`. The inverse
//! produces 2N windowed samples scaled by 2/N; overlap-adding the halves
//! of consecutive blocks reconstructs the signal exactly (the aliasing the
//! forward transform introduces cancels between neighbours).
//!
//! Internally a block is folded to an N-point DCT-IV, which is evaluated
//! with one N/2-point complex FFT — the transform costs O(N log N), a
//! small fraction of the encoder's quantization search.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Coefficients per granule.
pub const GRANULE: usize = 576;

/// A planned MDCT of size `n` (outputs `n` coefficients from `2n` samples).
pub struct Mdct {
    n: usize,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    /// Pre-twiddles e^(-i pi (8m+1) / (8n)) for the DCT-IV input mapping.
    pre: Vec<Complex<f64>>,
    /// Post-twiddles e^(-i pi (8j+1) / (8n)) applied to the FFT output.
    post: Vec<Complex<f64>>,
}

impl Mdct {
    /// Plan a transform. `n` must be even and at least 2.
    pub fn new(n: usize) -> Mdct {
        assert!(n >= 2 && n.is_multiple_of(2), "MDCT size must be even");
        let window = (0..2 * n)
            .map(|i| (std::f64::consts::PI / (2.0 * n as f64) * (i as f64 + 0.5)).sin())
            .collect();
        let m = n / 2;
        let fft = FftPlanner::new().plan_fft_forward(m);
        let angle = |i: usize| -std::f64::consts::PI * (8.0 * i as f64 + 1.0) / (8.0 * n as f64);
        let pre = (0..m).map(|i| Complex::from_polar(1.0, angle(i))).collect();
        let post = (0..m).map(|j| Complex::from_polar(1.0, angle(j))).collect();
        Mdct {
            n,
            window,
            fft,
            pre,
            post,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// The analysis/synthesis window, 2n samples.
    pub fn window(&self) -> &[f64] {
        &self.window
    }

    /// DCT-IV: X[k] = sum_n u[n] cos(pi/n (n + 1/2)(k + 1/2)), computed by
    /// packing even/odd-reversed pairs into n/2 complex points.
    fn dct4(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n;
        let m = n / 2;
        let mut buf: Vec<Complex<f64>> = (0..m)
            .map(|i| Complex::new(u[2 * i], u[n - 1 - 2 * i]) * self.pre[i])
            .collect();
        self.fft.process(&mut buf);
        let mut out = vec![0.0; n];
        for (j, z) in buf.iter().enumerate() {
            let y = z * self.post[j];
            out[2 * j] = y.re;
            out[n - 1 - 2 * j] = -y.im;
        }
        out
    }

    /// Transform a 2n-sample block into n coefficients.
    pub fn forward(&self, block: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(block.len(), 2 * n, "forward takes a 2n-sample block");
        let h = n / 2;
        // Fold the windowed block onto the DCT-IV input: the cosine's
        // symmetries map positions n/2..2n onto 0..n with sign flips.
        let mut u = vec![0.0; n];
        let v = |i: usize| self.window[i] * block[i];
        for (i, slot) in u.iter_mut().enumerate() {
            *slot = if i < h {
                -v(3 * h - 1 - i) - v(3 * h + i)
            } else {
                v(i - h) - v(3 * h - 1 - i)
            };
        }
        self.dct4(&u)
    }

    /// Inverse-transform n coefficients into 2n windowed samples, scaled by
    /// 2/n, ready for overlap-add.
    pub fn inverse(&self, spectrum: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(spectrum.len(), n, "inverse takes n coefficients");
        let h = n / 2;
        let u = self.dct4(spectrum);
        let mut out = vec![0.0; 2 * n];
        // Unfold: each output position reads the alias image its folded
        // slot carried, with the matching sign.
        for (i, sample) in out.iter_mut().enumerate() {
            *sample = if i < h {
                u[i + h]
            } else if i < 3 * h {
                -u[3 * h - 1 - i]
            } else {
                -u[i - 3 * h]
            };
            *sample *= 2.0 / n as f64 * self.window[i];
        }
        out
    }
}
