//! Pitch-class (chroma) energy folding.
//!
//! Spectral power is folded onto 12 pitch classes referenced to A440
//! (class 0 = A). Each bin is normalized by the total chroma energy; the
//! 13th value is the population std across the 12 normalized bins.

use crate::features::spectral::SILENT_EPS;
use crate::util::pop_std;

/// Maps half-spectrum bins to pitch classes for a fixed spectrum size.
pub struct ChromaComputer {
    /// pitch class per bin; bin 0 (DC) carries no pitch
    bin_class: Vec<Option<usize>>,
}

impl ChromaComputer {
    pub fn new(num_bins: usize, sample_rate_hz: u32) -> Self {
        let nyquist = sample_rate_hz as f64 / 2.0;
        let bin_class = (0..num_bins)
            .map(|k| {
                if k == 0 {
                    return None;
                }
                let f = k as f64 * nyquist / num_bins as f64;
                let semitones = (12.0 * (f / 440.0).log2()).round() as i64;
                Some(semitones.rem_euclid(12) as usize)
            })
            .collect();
        Self { bin_class }
    }

    /// Normalized 12-bin chroma vector and its std. All zeros for a silent
    /// frame.
    pub fn compute(&self, mag: &[f64]) -> ([f64; 12], f64) {
        let mut bins = [0.0f64; 12];
        for (k, &m) in mag.iter().enumerate() {
            if let Some(c) = self.bin_class[k] {
                bins[c] += m * m;
            }
        }
        let total: f64 = bins.iter().sum();
        if total < SILENT_EPS {
            return ([0.0; 12], 0.0);
        }
        for b in bins.iter_mut() {
            *b /= total;
        }
        let std = pop_std(&bins);
        (bins, std)
    }
}
