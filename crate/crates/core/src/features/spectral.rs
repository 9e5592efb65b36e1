//! Per-frame time-domain and spectral-shape descriptors.
//!
//! Frequencies are normalized by Nyquist: bin `k` of an `M`-bin half-spectrum
//! sits at `k / M`. A frame whose total spectral magnitude falls below
//! [`SILENT_EPS`] is treated as silent and every spectral descriptor is
//! defined as 0.

/// Threshold below which a magnitude spectrum counts as silent.
pub const SILENT_EPS: f64 = 1e-12;

/// Fraction of sign changes between consecutive samples. Zero takes the sign
/// of "non-negative".
pub fn zero_crossing_rate(frame: &[f64]) -> f64 {
    assert!(frame.len() >= 2, "zcr needs at least 2 samples");
    let non_neg = |x: f64| x >= 0.0;
    let changes = frame
        .windows(2)
        .filter(|w| non_neg(w[0]) != non_neg(w[1]))
        .count();
    changes as f64 / (frame.len() - 1) as f64
}

/// Mean of squared samples.
pub fn energy(frame: &[f64]) -> f64 {
    frame.iter().map(|x| x * x).sum::<f64>() / frame.len() as f64
}

/// Entropy of sub-block energies in bits. The frame is split into
/// `num_subframes` equal blocks (remainder truncated); a silent frame gives 0.
pub fn energy_entropy(frame: &[f64], num_subframes: usize) -> f64 {
    let block = frame.len() / num_subframes;
    if block == 0 {
        return 0.0;
    }
    let energies: Vec<f64> = (0..num_subframes)
        .map(|i| {
            frame[i * block..(i + 1) * block]
                .iter()
                .map(|x| x * x)
                .sum()
        })
        .collect();
    let total: f64 = energies.iter().sum();
    if total < SILENT_EPS {
        return 0.0;
    }
    -energies
        .iter()
        .map(|e| e / total)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.log2())
        .sum::<f64>()
}

/// Spectral centroid and spread over Nyquist-normalized bin frequencies,
/// weighted by magnitude. Returns `(0, 0)` for a silent frame.
pub fn centroid_and_spread(mag: &[f64]) -> (f64, f64) {
    let total: f64 = mag.iter().sum();
    if total < SILENT_EPS {
        return (0.0, 0.0);
    }
    let m = mag.len() as f64;
    let centroid = mag
        .iter()
        .enumerate()
        .map(|(k, &x)| (k as f64 / m) * x)
        .sum::<f64>()
        / total;
    let var = mag
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let d = k as f64 / m - centroid;
            d * d * x
        })
        .sum::<f64>()
        / total;
    (centroid, var.sqrt())
}

/// Entropy of the power spectrum over `num_bands` equal sub-bands, in bits.
pub fn spectral_entropy(mag: &[f64], num_bands: usize) -> f64 {
    let band = mag.len() / num_bands;
    if band == 0 {
        return 0.0;
    }
    let energies: Vec<f64> = (0..num_bands)
        .map(|i| mag[i * band..(i + 1) * band].iter().map(|x| x * x).sum())
        .collect();
    let total: f64 = energies.iter().sum();
    if total < SILENT_EPS {
        return 0.0;
    }
    -energies
        .iter()
        .map(|e| e / total)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.log2())
        .sum::<f64>()
}

/// Squared L2 distance between the sum-normalized magnitude spectra of the
/// current and previous frame; 0 when either frame is silent.
pub fn spectral_flux(mag: &[f64], prev_mag: &[f64]) -> f64 {
    let s1: f64 = mag.iter().sum();
    let s0: f64 = prev_mag.iter().sum();
    if s1 < SILENT_EPS || s0 < SILENT_EPS {
        return 0.0;
    }
    mag.iter()
        .zip(prev_mag)
        .map(|(a, b)| {
            let d = a / s1 - b / s0;
            d * d
        })
        .sum()
}

/// Smallest Nyquist-normalized frequency below which `fraction` of the
/// spectral energy is contained. 0 for a silent frame.
pub fn spectral_rolloff(mag: &[f64], fraction: f64) -> f64 {
    let power: Vec<f64> = mag.iter().map(|x| x * x).collect();
    let total: f64 = power.iter().sum();
    if total < SILENT_EPS {
        return 0.0;
    }
    let target = fraction * total;
    let mut cum = 0.0;
    for (k, p) in power.iter().enumerate() {
        cum += p;
        if cum >= target {
            return k as f64 / mag.len() as f64;
        }
    }
    (mag.len() - 1) as f64 / mag.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::magnitude_spectrum;

    #[test]
    fn zcr_constant_signal_is_zero() {
        assert_eq!(zero_crossing_rate(&[0.3; 10]), 0.0);
    }

    #[test]
    fn zcr_alternating_is_one() {
        assert_eq!(zero_crossing_rate(&[1.0, -1.0, 1.0, -1.0, 1.0]), 1.0);
    }

    #[test]
    fn zcr_counts_sign_changes() {
        let v = [0.2, -0.1, -0.3, 0.4];
        assert!((zero_crossing_rate(&v) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zcr_zero_sample_is_non_negative() {
        // signs: + + - : one change
        assert!((zero_crossing_rate(&[0.0, 0.5, -0.5]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn energy_entropy_uniform_blocks() {
        // identical energy in all 10 blocks -> log2(10)
        let frame = vec![0.5; 100];
        assert!((energy_entropy(&frame, 10) - 10.0f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn energy_entropy_single_block() {
        let mut frame = vec![0.0; 100];
        frame[3] = 1.0;
        assert_eq!(energy_entropy(&frame, 10), 0.0);
    }

    #[test]
    fn energy_entropy_two_blocks_hand_value() {
        // block energies {3, 1, 0, ..., 0}:
        // -(0.75*log2(0.75) + 0.25*log2(0.25)) = 0.81127812...
        let mut frame = vec![0.0; 100];
        frame[0] = 3.0f64.sqrt();
        frame[10] = 1.0;
        assert!((energy_entropy(&frame, 10) - 0.8112781244591328).abs() < 1e-12);
    }

    #[test]
    fn silent_frame_features_are_zero() {
        let mag = vec![0.0; 400];
        assert_eq!(centroid_and_spread(&mag), (0.0, 0.0));
        assert_eq!(spectral_entropy(&mag, 10), 0.0);
        assert_eq!(spectral_rolloff(&mag, 0.9), 0.0);
        assert_eq!(spectral_flux(&mag, &mag), 0.0);
        assert_eq!(energy(&vec![0.0; 800]), 0.0);
        assert_eq!(energy_entropy(&vec![0.0; 800], 10), 0.0);
    }

    #[test]
    fn sine_centroid_sits_at_normalized_frequency() {
        let n = 800;
        let sr = 16000.0;
        let frame: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * 1000.0 * i as f64 / sr).sin())
            .collect();
        let mag = magnitude_spectrum(&frame);
        let (c, _) = centroid_and_spread(&mag);
        assert!((c - 0.125).abs() < 0.01, "centroid {c}");
    }

    #[test]
    fn flux_of_identical_frames_is_zero_and_nonnegative() {
        let a: Vec<f64> = (0..100).map(|i| (i as f64 * 0.1).sin().abs()).collect();
        let b: Vec<f64> = (0..100)
            .map(|i| (i as f64 * 0.17).cos().abs() + 0.1)
            .collect();
        assert_eq!(spectral_flux(&a, &a), 0.0);
        assert!(spectral_flux(&a, &b) >= 0.0);
    }

    #[test]
    fn rolloff_bounds() {
        let mag: Vec<f64> = (0..400).map(|k| if k == 10 { 5.0 } else { 0.01 }).collect();
        let r = spectral_rolloff(&mag, 0.9);
        assert!((0.0..1.0).contains(&r));
    }
}
