//! Per-recording acoustic feature extraction.
//!
//! Each analysis frame yields a 34-value descriptor (time-domain, spectral
//! shape, 13 MFCCs, 12 chroma bins plus chroma std). [`aggregate`] then folds
//! the frame sequence into one fixed 136-value vector per recording:
//! for every short-term feature, the mean and population std of both the raw
//! sequence and its first difference (delta), in the column order given by
//! [`feature_vector_names`].

pub mod chroma;
pub mod mfcc;
pub mod spectral;

use crate::audio::FrameSequence;
use crate::spectrum::{hamming, windowed_magnitude_spectrum};
use crate::util::{mean, pop_std};
use crate::{Error, Result};

/// Number of short-term features per frame.
pub const NUM_SHORT_TERM: usize = 34;
/// Number of aggregated features per recording.
pub const NUM_AGGREGATED: usize = NUM_SHORT_TERM * 4;

/// Mel filters used for the MFCC bank.
pub const MFCC_NUM_FILTERS: usize = 26;
/// Cepstral coefficients kept.
pub const MFCC_NUM_COEFFS: usize = 13;
/// Sub-blocks for entropy of energy.
pub const ENERGY_ENTROPY_BLOCKS: usize = 10;
/// Sub-bands for spectral entropy.
pub const SPECTRAL_ENTROPY_BANDS: usize = 10;
/// Energy fraction defining the rolloff point.
pub const ROLLOFF_FRACTION: f64 = 0.9;

/// Ordered names of the 34 short-term features.
pub fn short_term_names() -> Vec<String> {
    let mut names = vec![
        "zcr".to_string(),
        "energy".to_string(),
        "energy_entropy".to_string(),
        "spectral_centroid".to_string(),
        "spectral_spread".to_string(),
        "spectral_entropy".to_string(),
        "spectral_flux".to_string(),
        "spectral_rolloff".to_string(),
    ];
    names.extend((1..=MFCC_NUM_COEFFS).map(|i| format!("mfcc_{i}")));
    names.extend((1..=12).map(|i| format!("chroma_{i}")));
    names.push("chroma_std".to_string());
    names
}

/// Ordered names of the 136 aggregated features: per short-term feature,
/// `<name>_mean`, `<name>_std`, `<name>_delta_mean`, `<name>_delta_std`.
pub fn feature_vector_names() -> Vec<String> {
    short_term_names()
        .iter()
        .flat_map(|n| {
            [
                format!("{n}_mean"),
                format!("{n}_std"),
                format!("{n}_delta_mean"),
                format!("{n}_delta_std"),
            ]
        })
        .collect()
}

/// One 34-value descriptor per frame.
#[derive(Debug, Clone)]
pub struct ShortTermFeatures {
    /// `num_frames x 34`
    pub values: Vec<Vec<f64>>,
}

impl ShortTermFeatures {
    pub fn num_frames(&self) -> usize {
        self.values.len()
    }
}

/// Fixed-length per-recording descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub source_id: String,
}

/// Computes the 34 short-term features for every frame.
///
/// Needs at least 2 frames (spectral flux requires a predecessor; frame 0's
/// flux is 0). The magnitude spectrum comes from a Hamming-windowed DFT of
/// each frame.
pub fn short_term_features(frames: &FrameSequence) -> Result<ShortTermFeatures> {
    if frames.num_frames() < 2 {
        return Err(Error::TooFewFrames {
            got: frames.num_frames(),
            need: 2,
        });
    }
    let window = hamming(frames.frame_len);
    let num_bins = frames.frame_len / 2;
    let mfcc = mfcc::MfccComputer::new(
        num_bins,
        frames.sample_rate_hz,
        MFCC_NUM_FILTERS,
        MFCC_NUM_COEFFS,
    );
    let chroma = chroma::ChromaComputer::new(num_bins, frames.sample_rate_hz);

    let mut values = Vec::with_capacity(frames.num_frames());
    let mut prev_mag: Option<Vec<f64>> = None;
    for frame in &frames.frames {
        let mag = windowed_magnitude_spectrum(frame, &window);

        let mut row = Vec::with_capacity(NUM_SHORT_TERM);
        row.push(spectral::zero_crossing_rate(frame));
        row.push(spectral::energy(frame));
        row.push(spectral::energy_entropy(frame, ENERGY_ENTROPY_BLOCKS));
        let (centroid, spread) = spectral::centroid_and_spread(&mag);
        row.push(centroid);
        row.push(spread);
        row.push(spectral::spectral_entropy(&mag, SPECTRAL_ENTROPY_BANDS));
        row.push(match &prev_mag {
            Some(prev) => spectral::spectral_flux(&mag, prev),
            None => 0.0,
        });
        row.push(spectral::spectral_rolloff(&mag, ROLLOFF_FRACTION));
        row.extend(mfcc.compute(&mag));
        let (chroma_bins, chroma_std) = chroma.compute(&mag);
        row.extend(chroma_bins);
        row.push(chroma_std);
        debug_assert_eq!(row.len(), NUM_SHORT_TERM);

        prev_mag = Some(mag);
        values.push(row);
    }
    Ok(ShortTermFeatures { values })
}

/// Aggregates a frame-level feature matrix into one 136-value vector:
/// delta sequences are first differences along time (delta of frame 0 is 0),
/// then each of the 68 raw+delta sequences contributes its mean and
/// population std.
pub fn aggregate(st: &ShortTermFeatures, source_id: &str) -> Result<FeatureVector> {
    let n = st.num_frames();
    if n < 2 {
        return Err(Error::TooFewFrames { got: n, need: 2 });
    }
    let mut values = Vec::with_capacity(NUM_AGGREGATED);
    for f in 0..NUM_SHORT_TERM {
        let raw: Vec<f64> = st.values.iter().map(|row| row[f]).collect();
        let mut delta = vec![0.0];
        delta.extend(raw.windows(2).map(|w| w[1] - w[0]));
        values.push(mean(&raw));
        values.push(pop_std(&raw));
        values.push(mean(&delta));
        values.push(pop_std(&delta));
    }
    for (col, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteFeature { row: 0, col });
        }
    }
    Ok(FeatureVector {
        values,
        source_id: source_id.to_string(),
    })
}

/// Full extraction path for one clip at the given framing.
pub fn extract_feature_vector(
    clip: &crate::audio::AudioClip,
    frame_size_ms: f64,
    frame_step_ms: f64,
) -> Result<FeatureVector> {
    let frames = crate::audio::frame_signal(clip, frame_size_ms, frame_step_ms)?;
    let st = short_term_features(&frames)?;
    aggregate(&st, &clip.source_id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::AudioClip;

    fn clip_from(samples: Vec<f64>, sr: u32) -> AudioClip {
        AudioClip {
            samples,
            sample_rate_hz: sr,
            source_id: "t".into(),
        }
    }

    fn frames_of(samples: Vec<f64>, sr: u32) -> FrameSequence {
        crate::audio::frame_signal(&clip_from(samples, sr), 50.0, 25.0).unwrap()
    }

    #[test]
    fn name_lists_have_contract_lengths() {
        assert_eq!(short_term_names().len(), NUM_SHORT_TERM);
        let names = feature_vector_names();
        assert_eq!(names.len(), 136);
        assert_eq!(names[0], "zcr_mean");
        assert_eq!(names[3], "zcr_delta_std");
        assert_eq!(names[4], "energy_mean");
        assert_eq!(names[135], "chroma_std_delta_std");
    }

    #[test]
    fn too_few_frames_is_an_error() {
        let fs = frames_of(vec![0.1; 800], 16000);
        assert_eq!(fs.num_frames(), 1);
        assert!(matches!(
            short_term_features(&fs),
            Err(Error::TooFewFrames { .. })
        ));
    }

    #[test]
    fn silent_clip_rows_follow_silent_rules() {
        let fs = frames_of(vec![0.0; 2400], 16000);
        let st = short_term_features(&fs).unwrap();
        for row in &st.values {
            assert_eq!(row[0], 0.0); // zcr
            assert_eq!(row[1], 0.0); // energy
            assert_eq!(row[2], 0.0); // energy entropy
            for k in 3..8 {
                assert_eq!(row[k], 0.0); // centroid..rolloff
            }
            // mfcc of the log-floor constant
            assert!((row[8] - 26.0f64.sqrt() * 1e-10f64.ln()).abs() < 1e-9);
            for k in 9..21 {
                assert!(row[k].abs() < 1e-9);
            }
            for k in 21..34 {
                assert_eq!(row[k], 0.0); // chroma + std
            }
        }
    }

    #[test]
    fn aggregate_identical_frames_has_zero_stds_and_deltas() {
        let row = vec![0.5; NUM_SHORT_TERM];
        let st = ShortTermFeatures {
            values: vec![row.clone(), row.clone(), row],
        };
        let fv = aggregate(&st, "x").unwrap();
        for f in 0..NUM_SHORT_TERM {
            assert_eq!(fv.values[4 * f + 1], 0.0, "std");
            assert_eq!(fv.values[4 * f + 2], 0.0, "delta mean");
            assert_eq!(fv.values[4 * f + 3], 0.0, "delta std");
        }
    }

    #[test]
    fn aggregate_two_frame_arithmetic() {
        let mut a = vec![0.0; NUM_SHORT_TERM];
        let mut b = vec![0.0; NUM_SHORT_TERM];
        a[0] = 0.2;
        b[0] = 0.4;
        let st = ShortTermFeatures { values: vec![a, b] };
        let fv = aggregate(&st, "x").unwrap();
        assert!((fv.values[0] - 0.3).abs() < 1e-12); // zcr_mean
        assert!((fv.values[1] - 0.1).abs() < 1e-12); // zcr_std
        assert!((fv.values[2] - 0.1).abs() < 1e-12); // zcr_delta_mean (deltas {0, 0.2})
        assert_eq!(fv.values.len(), 136);
    }

    #[test]
    fn alternating_frame_has_unit_zcr() {
        let samples: Vec<f64> = (0..2400)
            .map(|i| if i % 2 == 0 { 0.5 } else { -0.5 })
            .collect();
        let st = short_term_features(&frames_of(samples, 16000)).unwrap();
        for row in &st.values {
            assert_eq!(row[0], 1.0);
        }
    }

    #[test]
    fn scale_invariance_except_energy() {
        let samples: Vec<f64> = (0..4800)
            .map(|i| {
                let t = i as f64 / 16000.0;
                0.4 * (2.0 * std::f64::consts::PI * 315.0 * t).sin()
                    + 0.2 * (2.0 * std::f64::consts::PI * 1234.0 * t).sin()
            })
            .collect();
        let g = 0.37;
        let scaled: Vec<f64> = samples.iter().map(|x| x * g).collect();
        let a = short_term_features(&frames_of(samples, 16000)).unwrap();
        let b = short_term_features(&frames_of(scaled, 16000)).unwrap();
        for (ra, rb) in a.values.iter().zip(&b.values) {
            for (k, (&va, &vb)) in ra.iter().zip(rb).enumerate() {
                match k {
                    1 => assert!((vb - va * g * g).abs() < 1e-9, "energy scales by g^2"),
                    8 => {} // mfcc_1 shifts by the log of the gain
                    _ => assert!((va - vb).abs() < 1e-9, "feature {k}: {va} vs {vb}"),
                }
            }
        }
    }

    #[test]
    fn feature_vector_is_finite_on_speechlike_input() {
        let samples: Vec<f64> = (0..16000)
            .map(|i| {
                let t = i as f64 / 16000.0;
                (2.0 * std::f64::consts::PI * 180.0 * t).sin()
                    * (1.0 + 0.5 * (2.0 * std::f64::consts::PI * 3.0 * t).sin())
                    * 0.4
            })
            .collect();
        let fv = extract_feature_vector(&clip_from(samples, 16000), 50.0, 25.0).unwrap();
        assert_eq!(fv.values.len(), NUM_AGGREGATED);
        assert!(fv.values.iter().all(|v| v.is_finite()));
        // std components are the 2nd and 4th of each quadruple
        for f in 0..NUM_SHORT_TERM {
            assert!(fv.values[4 * f + 1] >= 0.0);
            assert!(fv.values[4 * f + 3] >= 0.0);
        }
    }
}
