//! RIFF/WAVE reading and writing.
//!
//! Read accepts mono 16-bit integer PCM and mono 32-bit IEEE float;
//! write always emits 16-bit integer PCM. Integer samples map to float
//! as `v / 32768`, and writing quantizes with `round(clamp(v) * 32768)`
//! saturated to the 16-bit range, so a write/read cycle of quantized
//! data is lossless.

use std::fs;
use std::path::Path;

use super::{AudioBuffer, AudioError};

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;

/// Reads a mono WAV file into an [`AudioBuffer`].
pub fn read_wav(path: &Path) -> Result<AudioBuffer, AudioError> {
    let bytes = fs::read(path)?;
    parse_wav(&bytes)
}

fn parse_wav(bytes: &[u8]) -> Result<AudioBuffer, AudioError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(AudioError::MalformedWav(
            "missing RIFF/WAVE header".into(),
        ));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    let mut offset = 12usize;
    while offset + 8 <= bytes.len() {
        let id = &bytes[offset..offset + 4];
        let size = u32::from_le_bytes(bytes[offset + 4..offset + 8].try_into().unwrap()) as usize;
        let body_start = offset + 8;
        let body_end = body_start
            .checked_add(size)
            .ok_or_else(|| AudioError::MalformedWav("chunk size overflow".into()))?;
        if body_end > bytes.len() {
            return Err(AudioError::MalformedWav(format!(
                "chunk {:?} overruns file",
                String::from_utf8_lossy(id)
            )));
        }
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => fmt = Some(FmtChunk::parse(body)?),
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word-aligned; odd sizes carry one pad byte.
        offset = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| AudioError::MalformedWav("missing fmt chunk".into()))?;
    let data = data.ok_or_else(|| AudioError::MalformedWav("missing data chunk".into()))?;

    if fmt.channels != 1 {
        return Err(AudioError::MultiChannelUnsupported {
            channels: fmt.channels,
        });
    }
    if fmt.sample_rate == 0 {
        return Err(AudioError::MalformedWav("sample rate is zero".into()));
    }

    let samples = match (fmt.format_tag, fmt.bits_per_sample) {
        (FORMAT_PCM, 16) => {
            if data.len() % 2 != 0 {
                return Err(AudioError::MalformedWav(
                    "data chunk is not a whole number of 16-bit samples".into(),
                ));
            }
            data.chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / 32768.0)
                .collect::<Vec<_>>()
        }
        (FORMAT_IEEE_FLOAT, 32) => {
            if data.len() % 4 != 0 {
                return Err(AudioError::MalformedWav(
                    "data chunk is not a whole number of float32 samples".into(),
                ));
            }
            let samples: Vec<f64> = data
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
                .collect();
            if samples.iter().any(|s| !s.is_finite()) {
                return Err(AudioError::MalformedWav(
                    "float data contains non-finite samples".into(),
                ));
            }
            samples
        }
        (format_tag, bits_per_sample) => {
            return Err(AudioError::UnsupportedEncoding {
                format_tag,
                bits_per_sample,
            })
        }
    };

    AudioBuffer::new(samples, fmt.sample_rate)
}

struct FmtChunk {
    format_tag: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

impl FmtChunk {
    fn parse(body: &[u8]) -> Result<Self, AudioError> {
        if body.len() < 16 {
            return Err(AudioError::MalformedWav("fmt chunk too short".into()));
        }
        Ok(FmtChunk {
            format_tag: u16::from_le_bytes([body[0], body[1]]),
            channels: u16::from_le_bytes([body[2], body[3]]),
            sample_rate: u32::from_le_bytes([body[4], body[5], body[6], body[7]]),
            bits_per_sample: u16::from_le_bytes([body[14], body[15]]),
        })
    }
}

/// Quantizes one sample to 16-bit PCM.
fn quantize_i16(v: f64) -> i16 {
    let scaled = (v.clamp(-1.0, 1.0) * 32768.0).round();
    scaled.clamp(i16::MIN as f64, i16::MAX as f64) as i16
}

/// Writes the buffer to `path` as mono 16-bit PCM.
///
/// Amplitudes are clamped to `[-1, 1]` before quantization.
pub fn write_wav(buffer: &AudioBuffer, path: &Path) -> Result<(), AudioError> {
    let data_len = buffer.len() * 2;
    let mut bytes = Vec::with_capacity(44 + data_len);
    let sample_rate = buffer.sample_rate_hz();
    let byte_rate = sample_rate * 2;

    bytes.extend_from_slice(b"RIFF");
    bytes.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    bytes.extend_from_slice(b"WAVE");
    bytes.extend_from_slice(b"fmt ");
    bytes.extend_from_slice(&16u32.to_le_bytes());
    bytes.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    bytes.extend_from_slice(&1u16.to_le_bytes()); // channels
    bytes.extend_from_slice(&sample_rate.to_le_bytes());
    bytes.extend_from_slice(&byte_rate.to_le_bytes());
    bytes.extend_from_slice(&2u16.to_le_bytes()); // block align
    bytes.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    bytes.extend_from_slice(b"data");
    bytes.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &v in buffer.samples() {
        bytes.extend_from_slice(&quantize_i16(v).to_le_bytes());
    }

    fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn wav_bytes(format_tag: u16, channels: u16, rate: u32, bits: u16, data: &[u8]) -> Vec<u8> {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&(36 + data.len() as u32).to_le_bytes());
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&16u32.to_le_bytes());
        bytes.extend_from_slice(&format_tag.to_le_bytes());
        bytes.extend_from_slice(&channels.to_le_bytes());
        bytes.extend_from_slice(&rate.to_le_bytes());
        bytes.extend_from_slice(&(rate * channels as u32 * (bits as u32 / 8)).to_le_bytes());
        bytes.extend_from_slice(&(channels * bits / 8).to_le_bytes());
        bytes.extend_from_slice(&bits.to_le_bytes());
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&(data.len() as u32).to_le_bytes());
        bytes.extend_from_slice(data);
        bytes
    }

    #[test]
    fn one_second_mono_16bit() {
        let data = vec![0u8; 22050 * 2];
        let buf = parse_wav(&wav_bytes(FORMAT_PCM, 1, 22050, 16, &data)).unwrap();
        assert_eq!(buf.len(), 22050);
        assert_eq!(buf.sample_rate_hz(), 22050);
    }

    #[test]
    fn int16_scaling_rule() {
        // 32767 -> 32767/32768, -32768 -> -1.0
        let mut data = Vec::new();
        data.extend_from_slice(&32767i16.to_le_bytes());
        data.extend_from_slice(&(-32768i16).to_le_bytes());
        let buf = parse_wav(&wav_bytes(FORMAT_PCM, 1, 16000, 16, &data)).unwrap();
        assert_eq!(buf.samples()[0], 32767.0 / 32768.0);
        assert_eq!(buf.samples()[1], -1.0);
    }

    #[test]
    fn float32_read() {
        let mut data = Vec::new();
        for v in [0.25f32, -0.5, 1.0] {
            data.extend_from_slice(&v.to_le_bytes());
        }
        let buf = parse_wav(&wav_bytes(FORMAT_IEEE_FLOAT, 1, 48000, 32, &data)).unwrap();
        assert_eq!(buf.samples(), &[0.25, -0.5, 1.0]);
    }

    #[test]
    fn rejects_stereo() {
        let bytes = wav_bytes(FORMAT_PCM, 2, 22050, 16, &[0u8; 8]);
        assert!(matches!(
            parse_wav(&bytes),
            Err(AudioError::MultiChannelUnsupported { channels: 2 })
        ));
    }

    #[test]
    fn rejects_unsupported_bit_depth() {
        let bytes = wav_bytes(FORMAT_PCM, 1, 22050, 8, &[0u8; 8]);
        assert!(matches!(
            parse_wav(&bytes),
            Err(AudioError::UnsupportedEncoding {
                bits_per_sample: 8,
                ..
            })
        ));
    }

    #[test]
    fn rejects_truncated_file() {
        let mut bytes = wav_bytes(FORMAT_PCM, 1, 22050, 16, &[0u8; 64]);
        bytes.truncate(50);
        assert!(matches!(
            parse_wav(&bytes),
            Err(AudioError::MalformedWav(_))
        ));
    }

    #[test]
    fn clamps_out_of_range_before_quantizing() {
        // A 1.5 sample must produce the same bytes as a 1.0 sample.
        assert_eq!(quantize_i16(1.5), quantize_i16(1.0));
        assert_eq!(quantize_i16(-2.0), quantize_i16(-1.0));
        assert_eq!(quantize_i16(1.0), 32767);
        assert_eq!(quantize_i16(-1.0), -32768);
    }

    #[test]
    fn quantization_round_trip_is_lossless_for_all_16bit_values() {
        for k in i16::MIN as i32..=i16::MAX as i32 {
            let v = k as f64 / 32768.0;
            assert_eq!(quantize_i16(v) as i32, k, "value {k} did not round-trip");
        }
    }

    #[test]
    fn write_then_read_is_bit_identical_for_quantized_buffers() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("roundtrip.wav");
        // Arbitrary buffer, quantized once by a write/read cycle.
        let raw: Vec<f64> = (0..1000).map(|i| ((i as f64) * 0.37).sin() * 0.9).collect();
        write_wav(&AudioBuffer::new(raw, 8000).unwrap(), &path).unwrap();
        let quantized = read_wav(&path).unwrap();
        write_wav(&quantized, &path).unwrap();
        let again = read_wav(&path).unwrap();
        assert_eq!(quantized, again);
    }

    #[test]
    fn all_zero_buffer_writes_zero_data() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("zeros.wav");
        write_wav(&AudioBuffer::new(vec![0.0; 16], 8000).unwrap(), &path).unwrap();
        let buf = read_wav(&path).unwrap();
        assert!(buf.samples().iter().all(|&s| s == 0.0));
        assert_eq!(buf.len(), 16);
    }
}
