//! WAV decoding and short-term framing.
//!
//! Decodes RIFF/WAVE containers (PCM 16-bit or IEEE float 32-bit, mono or
//! stereo) into normalized mono sample buffers, and slices clips into
//! overlapping analysis frames. Everything here is pure and immutable after
//! construction; decoding different files in parallel is the intended unit of
//! parallelism.

use crate::{Error, Result};

/// A decoded mono waveform. Samples are amplitudes in `[-1.0, 1.0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate_hz: u32,
    pub source_id: String,
}

impl AudioClip {
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }
}

/// Overlapping analysis frames cut from one clip.
///
/// `frame_len = round(frame_size_ms * sample_rate_hz / 1000)` and consecutive
/// frames overlap by `frame_len - step_len` samples. Trailing samples that do
/// not fill a final frame are dropped.
#[derive(Debug, Clone)]
pub struct FrameSequence {
    pub frames: Vec<Vec<f64>>,
    pub frame_len: usize,
    pub step_len: usize,
    pub frame_size_ms: f64,
    pub frame_step_ms: f64,
    pub sample_rate_hz: u32,
}

impl FrameSequence {
    pub fn num_frames(&self) -> usize {
        self.frames.len()
    }
}

fn read_u16(b: &[u8], at: usize) -> Result<u16> {
    let s = b
        .get(at..at + 2)
        .ok_or_else(|| Error::MalformedContainer("truncated chunk".into()))?;
    Ok(u16::from_le_bytes([s[0], s[1]]))
}

fn read_u32(b: &[u8], at: usize) -> Result<u32> {
    let s = b
        .get(at..at + 4)
        .ok_or_else(|| Error::MalformedContainer("truncated chunk".into()))?;
    Ok(u32::from_le_bytes([s[0], s[1], s[2], s[3]]))
}

struct WavFormat {
    audio_format: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

/// Decodes a RIFF/WAVE container into a normalized mono clip.
///
/// 16-bit integer samples are scaled by `1/32768`; 32-bit float samples are
/// clamped into `[-1, 1]`. Stereo is mixed down by per-sample channel
/// average.
pub fn decode_wav(bytes: &[u8], source_id: &str) -> Result<AudioClip> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::MalformedContainer("missing RIFF/WAVE magic".into()));
    }

    let mut fmt: Option<WavFormat> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12usize;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = read_u32(bytes, pos + 4)? as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .ok_or_else(|| Error::MalformedContainer("chunk size overflow".into()))?;
        if body_end > bytes.len() {
            return Err(Error::MalformedContainer(format!(
                "chunk {:?} overruns file",
                String::from_utf8_lossy(id)
            )));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(Error::MalformedContainer("fmt chunk too small".into()));
                }
                fmt = Some(WavFormat {
                    audio_format: read_u16(bytes, body_start)?,
                    channels: read_u16(bytes, body_start + 2)?,
                    sample_rate: read_u32(bytes, body_start + 4)?,
                    bits_per_sample: read_u16(bytes, body_start + 14)?,
                });
            }
            b"data" => data = Some(&bytes[body_start..body_end]),
            _ => {}
        }
        // chunk bodies are word-aligned
        pos = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| Error::MalformedContainer("missing fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::MalformedContainer("missing data chunk".into()))?;

    if fmt.channels == 0 || fmt.channels > 2 {
        return Err(Error::UnsupportedEncoding(format!(
            "{} channels (only mono/stereo supported)",
            fmt.channels
        )));
    }
    if fmt.sample_rate == 0 {
        return Err(Error::MalformedContainer("zero sample rate".into()));
    }

    let channels = fmt.channels as usize;
    let interleaved: Vec<f64> = match (fmt.audio_format, fmt.bits_per_sample) {
        (1, 16) => data
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / 32768.0)
            .collect(),
        (3, 32) => data
            .chunks_exact(4)
            .map(|c| (f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64).clamp(-1.0, 1.0))
            .collect(),
        (f, b) => {
            return Err(Error::UnsupportedEncoding(format!(
                "format tag {f} with {b} bits per sample"
            )))
        }
    };

    let samples: Vec<f64> = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(2)
            .map(|fr| (fr[0] + fr[1]) / 2.0)
            .collect()
    };

    if samples.is_empty() {
        return Err(Error::MalformedContainer("empty data chunk".into()));
    }

    Ok(AudioClip {
        samples,
        sample_rate_hz: fmt.sample_rate,
        source_id: source_id.to_string(),
    })
}

/// Encodes a mono clip as 16-bit PCM WAV bytes.
pub fn encode_wav_pcm16(samples: &[f64], sample_rate_hz: u32) -> Vec<u8> {
    let data_len = samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(sample_rate_hz * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in samples {
        let q = (s * 32767.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}

/// Slices a clip into overlapping frames. Trailing samples that do not fill a
/// final frame are dropped.
pub fn frame_signal(
    clip: &AudioClip,
    frame_size_ms: f64,
    frame_step_ms: f64,
) -> Result<FrameSequence> {
    let sr = clip.sample_rate_hz as f64;
    let frame_len = (frame_size_ms * sr / 1000.0).round() as usize;
    let step_len = (frame_step_ms * sr / 1000.0).round() as usize;
    assert!(frame_len > 0 && step_len > 0, "frame/step must be positive");

    let n = clip.samples.len();
    if n < frame_len {
        return Err(Error::ClipTooShort {
            samples: n,
            frame_len,
        });
    }
    let num_frames = (n - frame_len) / step_len + 1;
    let mut frames = Vec::with_capacity(num_frames);
    for i in 0..num_frames {
        let start = i * step_len;
        frames.push(clip.samples[start..start + frame_len].to_vec());
    }
    Ok(FrameSequence {
        frames,
        frame_len,
        step_len,
        frame_size_ms,
        frame_step_ms,
        sample_rate_hz: clip.sample_rate_hz,
    })
}
