//! Synthetic labeled recordings and transcripts with a separability dial.
//!
//! Audio: a harmonic tone with vibrato and slow amplitude modulation over a
//! small ambient noise floor. The positive class loses modulation depth and
//! rate by the factor `(1 - e)` and gains breath noise proportional to `e`,
//! where `e` is the configured separability scaled by a per-clip severity
//! draw. At `e = 0` both class generators are identical; at `e = 1` the
//! positive class is flat and breathy. Transcripts sample each token from
//! the label's class vocabulary with probability `e`, otherwise from the
//! shared vocabulary.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::audio::{encode_wav_pcm16, AudioClip};
use crate::dataset::{DatasetManifest, ManifestRow};
use crate::util::derive_seed;
use crate::Result;

/// Word pools for transcript generation.
#[derive(Debug, Clone)]
pub struct VocabSpec {
    pub shared: Vec<String>,
    pub positive: Vec<String>,
    pub negative: Vec<String>,
}

impl Default for VocabSpec {
    fn default() -> Self {
        let to_vec = |words: &[&str]| words.iter().map(|w| w.to_string()).collect();
        Self {
            shared: to_vec(&[
                "week",
                "sleep",
                "doctor",
                "family",
                "home",
                "work",
                "morning",
                "feeling",
                "called",
                "visit",
                "started",
                "talked",
                "normal",
                "usual",
                "weather",
                "coffee",
                "garden",
                "drive",
                "appointment",
                "phone",
                "watched",
                "dinner",
                "walked",
                "reading",
                "neighbor",
                "weekend",
                "helped",
                "schedule",
                "routine",
                "evening",
            ]),
            positive: to_vec(&[
                "chronic",
                "severe",
                "migraine",
                "sleeping",
                "problems",
                "pain",
                "pills",
                "tired",
                "hurting",
                "worse",
                "exhausted",
                "aching",
                "heavy",
                "awful",
                "numb",
            ]),
            negative: to_vec(&[
                "okay",
                "right",
                "helping",
                "appreciate",
                "improve",
                "trying",
                "function",
                "better",
                "noticed",
                "aware",
                "grateful",
                "hopeful",
                "stronger",
                "progress",
                "fine",
            ]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_recordings: usize,
    /// negatives per positive; counts are exact up to rounding
    pub imbalance: f64,
    /// separability dial in [0, 1]
    pub separability: f64,
    pub duration_range_s: (f64, f64),
    pub sample_rate_hz: u32,
    pub vocab: VocabSpec,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_recordings: 70,
            imbalance: 6.0,
            separability: 0.8,
            duration_range_s: (1.0, 3.0),
            sample_rate_hz: 16000,
            vocab: VocabSpec::default(),
            seed: 0,
        }
    }
}

impl SynthConfig {
    /// Positive count from the imbalance ratio: `round(n / (1 + imbalance))`.
    pub fn positive_count(&self) -> usize {
        (self.n_recordings as f64 / (1.0 + self.imbalance)).round() as usize
    }
}

/// Base amplitude of the harmonic stack before the per-clip gain.
const TONE_LEVEL: f64 = 0.55;
/// Breath-noise amplitude at full separability and severity.
const BREATH_LEVEL: f64 = 0.12;
/// Per-clip severity draw range for the positive class.
const SEVERITY_RANGE: (f64, f64) = (0.15, 1.0);

/// Generates one clip. The `rng` stream fully determines the draw.
pub fn synth_audio(label: u8, config: &SynthConfig, rng: &mut ChaCha8Rng) -> AudioClip {
    let sr = config.sample_rate_hz as f64;
    let duration = rng.random_range(config.duration_range_s.0..=config.duration_range_s.1);
    let n = (duration * sr).round() as usize;

    let f0 = rng.random_range(110.0..220.0);
    let gain = rng.random_range(0.6..0.8);
    let am_depth = rng.random_range(0.5..1.0);
    let am_rate = rng.random_range(2.0..4.0);
    let am_phase = rng.random_range(0.0..std::f64::consts::TAU);
    let vib_rate = rng.random_range(4.0..6.0);
    let vib_depth = rng.random_range(0.002..0.01);
    // wide ambient floor: mild positive clips overlap clean negatives
    let ambient = rng.random_range(0.01..0.08);
    let severity = rng.random_range(SEVERITY_RANGE.0..=SEVERITY_RANGE.1);

    // the positive class loses modulation and gains breath noise
    let contrast = if label == 1 {
        config.separability * severity
    } else {
        0.0
    };
    let depth_eff = am_depth * (1.0 - contrast);
    let rate_eff = am_rate * (1.0 - contrast);
    let breath = BREATH_LEVEL * contrast;

    let harmonics = [1.0, 0.5, 1.0 / 3.0, 0.25];
    let harmonic_norm: f64 = harmonics.iter().sum();

    let mut samples = Vec::with_capacity(n);
    let mut phase = 0.0f64;
    for i in 0..n {
        let t = i as f64 / sr;
        let inst_freq = f0 * (1.0 + vib_depth * (std::f64::consts::TAU * vib_rate * t).sin());
        phase += std::f64::consts::TAU * inst_freq / sr;
        let tone: f64 = harmonics
            .iter()
            .enumerate()
            .map(|(h, a)| a * ((h + 1) as f64 * phase).sin())
            .sum::<f64>()
            / harmonic_norm;
        let envelope =
            1.0 - depth_eff * (0.5 + 0.5 * (std::f64::consts::TAU * rate_eff * t + am_phase).sin());
        let noise = ambient * rng.random_range(-1.0..1.0) + breath * rng.random_range(-1.0..1.0);
        samples.push((gain * TONE_LEVEL * tone * envelope + noise).clamp(-1.0, 1.0));
    }

    AudioClip {
        samples,
        sample_rate_hz: config.sample_rate_hz,
        source_id: String::new(),
    }
}

/// Generates one transcript of 30..=120 tokens.
pub fn synth_transcript(label: u8, config: &SynthConfig, rng: &mut ChaCha8Rng) -> String {
    let n_tokens = rng.random_range(30..=120);
    let class_pool = if label == 1 {
        &config.vocab.positive
    } else {
        &config.vocab.negative
    };
    let mut words = Vec::with_capacity(n_tokens);
    for _ in 0..n_tokens {
        let from_class = rng.random::<f64>() < config.separability;
        let pool = if from_class {
            class_pool
        } else {
            &config.vocab.shared
        };
        words.push(pool[rng.random_range(0..pool.len())].as_str());
    }
    words.join(" ")
}

/// Writes the dataset tree (`audio/*.wav`, `text/*.txt`, `manifest.csv`)
/// under `out_dir` and returns the manifest.
pub fn synth_dataset(config: &SynthConfig, out_dir: &Path) -> Result<DatasetManifest> {
    std::fs::create_dir_all(out_dir.join("audio"))?;
    std::fs::create_dir_all(out_dir.join("text"))?;

    let n = config.n_recordings;
    let n_pos = config.positive_count();
    let mut labels = vec![1u8; n_pos];
    labels.extend(vec![0u8; n - n_pos]);
    {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "labels", 0));
        labels.shuffle(&mut rng);
    }

    let n_subjects = (n / 5).max(1);
    let mut rows = Vec::with_capacity(n);
    for (i, &label) in labels.iter().enumerate() {
        let source_id = format!("rec_{i:04}");
        let mut audio_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "audio", i as u64));
        let mut clip = synth_audio(label, config, &mut audio_rng);
        clip.source_id = source_id.clone();
        let audio_path = format!("audio/{source_id}.wav");
        std::fs::write(
            out_dir.join(&audio_path),
            encode_wav_pcm16(&clip.samples, clip.sample_rate_hz),
        )?;

        let mut text_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "text", i as u64));
        let transcript = synth_transcript(label, config, &mut text_rng);
        let transcript_path = format!("text/{source_id}.txt");
        std::fs::write(out_dir.join(&transcript_path), &transcript)?;

        rows.push(ManifestRow {
            source_id,
            audio_path,
            transcript_path,
            label,
            subject_id: format!("s{:03}", i % n_subjects),
        });
    }

    let manifest = DatasetManifest {
        rows,
        base_dir: out_dir.to_path_buf(),
    };
    manifest.save(&out_dir.join("manifest.csv"))?;
    Ok(manifest)
}
