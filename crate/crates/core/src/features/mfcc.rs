//! Mel-frequency cepstral coefficients.
//!
//! Triangular mel filterbank (`mel(f) = 2595 * log10(1 + f/700)`) spanning
//! 0..Nyquist, applied to the power spectrum; natural log of filter energies
//! floored at [`LOG_FLOOR`]; orthonormal DCT-II; first `num_coeffs`
//! coefficients kept.

/// Floor applied to filter energies before taking the log.
pub const LOG_FLOOR: f64 = 1e-10;

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Precomputed filterbank and DCT basis for a fixed spectrum size.
pub struct MfccComputer {
    /// per filter: (bin index, triangle weight), bins with zero weight omitted
    filters: Vec<Vec<(usize, f64)>>,
    /// row k = DCT-II basis vector for coefficient k
    dct: Vec<Vec<f64>>,
    num_coeffs: usize,
}

impl MfccComputer {
    pub fn new(
        num_bins: usize,
        sample_rate_hz: u32,
        num_filters: usize,
        num_coeffs: usize,
    ) -> Self {
        assert!(num_coeffs <= num_filters);
        let nyquist = sample_rate_hz as f64 / 2.0;
        let mel_max = hz_to_mel(nyquist);
        let edges: Vec<f64> = (0..num_filters + 2)
            .map(|i| mel_to_hz(mel_max * i as f64 / (num_filters + 1) as f64))
            .collect();

        let bin_freq = |k: usize| k as f64 * nyquist / num_bins as f64;
        let mut filters = Vec::with_capacity(num_filters);
        for j in 0..num_filters {
            let (lo, mid, hi) = (edges[j], edges[j + 1], edges[j + 2]);
            let mut taps = Vec::new();
            for k in 0..num_bins {
                let f = bin_freq(k);
                let w = if f >= lo && f <= mid && mid > lo {
                    (f - lo) / (mid - lo)
                } else if f > mid && f <= hi && hi > mid {
                    (hi - f) / (hi - mid)
                } else {
                    0.0
                };
                if w > 0.0 {
                    taps.push((k, w));
                }
            }
            filters.push(taps);
        }

        let m = num_filters as f64;
        let dct = (0..num_coeffs)
            .map(|k| {
                let alpha = if k == 0 {
                    (1.0 / m).sqrt()
                } else {
                    (2.0 / m).sqrt()
                };
                (0..num_filters)
                    .map(|i| {
                        alpha
                            * (std::f64::consts::PI * k as f64 * (2 * i + 1) as f64 / (2.0 * m))
                                .cos()
                    })
                    .collect()
            })
            .collect();

        Self {
            filters,
            dct,
            num_coeffs,
        }
    }

    /// MFCCs of one magnitude half-spectrum.
    pub fn compute(&self, mag: &[f64]) -> Vec<f64> {
        let log_energies: Vec<f64> = self
            .filters
            .iter()
            .map(|taps| {
                let e: f64 = taps.iter().map(|&(k, w)| w * mag[k] * mag[k]).sum();
                e.max(LOG_FLOOR).ln()
            })
            .collect();
        (0..self.num_coeffs)
            .map(|k| {
                self.dct[k]
                    .iter()
                    .zip(&log_energies)
                    .map(|(d, e)| d * e)
                    .sum()
            })
            .collect()
    }
}

/// One-shot MFCC computation for a single spectrum.
pub fn mfcc(mag: &[f64], sample_rate_hz: u32, num_filters: usize, num_coeffs: usize) -> Vec<f64> {
    MfccComputer::new(mag.len(), sample_rate_hz, num_filters, num_coeffs).compute(mag)
}
