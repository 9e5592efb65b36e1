//! Windowing and magnitude spectra.
//!
//! One frame in, one half-spectrum out: frames are Hamming-windowed, run
//! through a forward DFT at the frame length (no zero padding), and reduced
//! to the magnitudes of the first `N/2` bins. Bin `k` of a length-`N` frame
//! corresponds to frequency `k * sample_rate / N`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Hamming window of the given length.
pub fn hamming(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|i| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (len - 1) as f64).cos())
        .collect()
}

/// Magnitude of the first `N/2` DFT bins of `frame` (no windowing applied).
pub fn magnitude_spectrum(frame: &[f64]) -> Vec<f64> {
    let n = frame.len();
    let mut buf: Vec<Complex<f64>> = frame.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    buf[..n / 2].iter().map(|c| c.norm()).collect()
}

/// Hamming-windows `frame` and returns the half-spectrum magnitudes.
pub fn windowed_magnitude_spectrum(frame: &[f64], window: &[f64]) -> Vec<f64> {
    debug_assert_eq!(frame.len(), window.len());
    let windowed: Vec<f64> = frame.iter().zip(window).map(|(x, w)| x * w).collect();
    magnitude_spectrum(&windowed)
}
