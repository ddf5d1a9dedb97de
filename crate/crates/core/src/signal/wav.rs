//! 16-bit PCM RIFF/WAVE codec.
//!
//! Samples map to integers as `q = round(x · 32768)` clamped to
//! `[-32768, 32767]` after clipping `x` to `[-1, 1]`, and back as
//! `x = q / 32768`. Multi-channel input is downmixed by averaging.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::error::Result;
use crate::signal::Signal;

const FORMAT_PCM: u16 = 1;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;
const SCALE: f64 = 32768.0;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("bad `{chunk}` header: {reason}")]
    Header { chunk: &'static str, reason: String },

    #[error("`{chunk}` chunk is truncated")]
    Truncated { chunk: String },

    #[error("`fmt ` chunk: unsupported codec (format tag {format_tag:#06x}, {bits_per_sample} bits); only 16-bit PCM is supported")]
    UnsupportedCodec {
        format_tag: u16,
        bits_per_sample: u16,
    },

    #[error("`{chunk}` chunk is malformed: {reason}")]
    Malformed { chunk: &'static str, reason: String },

    #[error("missing `{0}` chunk")]
    MissingChunk(&'static str),
}

#[derive(Debug, Clone, Copy)]
struct Format {
    channels: u16,
    sample_rate: u32,
}

fn with_path(e: io::Error, path: &Path) -> io::Error {
    io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

pub fn wav_read(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|f| BufReader::new(f).read_to_end(&mut bytes))
        .map_err(|e| with_path(e, path))?;
    decode(&bytes)
}

pub fn wav_write(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    let path = path.as_ref();
    let mut writer = BufWriter::new(File::create(path).map_err(|e| with_path(e, path))?);
    encode(signal, &mut writer)?;
    writer.flush()?;
    Ok(())
}

pub fn quantize(x: f64) -> i16 {
    (x.clamp(-1.0, 1.0) * SCALE)
        .round()
        .clamp(-SCALE, SCALE - 1.0) as i16
}

pub fn dequantize(q: i16) -> f64 {
    q as f64 / SCALE
}

/// Writes a mono 16-bit PCM WAV stream.
pub fn encode<W: Write>(signal: &Signal, out: &mut W) -> io::Result<()> {
    let data_len = u32::try_from(signal.len() * 2)
        .ok()
        .filter(|n| *n <= u32::MAX - 36)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "signal too long for WAV"))?;
    let rate = signal.sample_rate();
    out.write_all(b"RIFF")?;
    out.write_all(&(36 + data_len).to_le_bytes())?;
    out.write_all(b"WAVE")?;
    out.write_all(b"fmt ")?;
    out.write_all(&16u32.to_le_bytes())?;
    out.write_all(&FORMAT_PCM.to_le_bytes())?;
    out.write_all(&1u16.to_le_bytes())?;
    out.write_all(&rate.to_le_bytes())?;
    out.write_all(&(rate * 2).to_le_bytes())?;
    out.write_all(&2u16.to_le_bytes())?;
    out.write_all(&16u16.to_le_bytes())?;
    out.write_all(b"data")?;
    out.write_all(&data_len.to_le_bytes())?;
    let mut buf = Vec::with_capacity(signal.len() * 2);
    for &x in signal.samples() {
        buf.extend_from_slice(&quantize(x).to_le_bytes());
    }
    out.write_all(&buf)
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(body: &[u8]) -> Result<Format, WavError> {
    if body.len() < 16 {
        return Err(WavError::Malformed {
            chunk: "fmt ",
            reason: format!("{} bytes, need at least 16", body.len()),
        });
    }
    let mut format_tag = u16_at(body, 0);
    let channels = u16_at(body, 2);
    let sample_rate = u32_at(body, 4);
    let bits_per_sample = u16_at(body, 14);
    if format_tag == FORMAT_EXTENSIBLE && body.len() >= 26 {
        // sub-format GUID starts at offset 24; its first two bytes are the tag
        format_tag = u16_at(body, 24);
    }
    if format_tag != FORMAT_PCM || bits_per_sample != 16 {
        return Err(WavError::UnsupportedCodec {
            format_tag,
            bits_per_sample,
        });
    }
    if channels == 0 {
        return Err(WavError::Malformed {
            chunk: "fmt ",
            reason: "zero channels".into(),
        });
    }
    if sample_rate == 0 {
        return Err(WavError::Malformed {
            chunk: "fmt ",
            reason: "zero sample rate".into(),
        });
    }
    Ok(Format {
        channels,
        sample_rate,
    })
}

/// Parses a complete WAV byte stream.
pub fn decode(bytes: &[u8]) -> Result<Signal> {
    if bytes.len() < 12 {
        return Err(WavError::Header {
            chunk: "RIFF",
            reason: format!("file is {} bytes, shorter than a RIFF header", bytes.len()),
        }
        .into());
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(WavError::Header {
            chunk: "RIFF",
            reason: "missing RIFF magic".into(),
        }
        .into());
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(WavError::Header {
            chunk: "WAVE",
            reason: "RIFF form type is not WAVE".into(),
        }
        .into());
    }

    let mut format = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start.checked_add(size).filter(|&e| e <= bytes.len());
        match id {
            b"fmt " => {
                let end = body_end.ok_or_else(|| WavError::Truncated {
                    chunk: "fmt ".into(),
                })?;
                format = Some(parse_fmt(&bytes[body_start..end])?);
            }
            b"data" => {
                let fmt = format.ok_or(WavError::MissingChunk("fmt "))?;
                let end = body_end.ok_or_else(|| WavError::Truncated {
                    chunk: "data".into(),
                })?;
                return decode_pcm16(&bytes[body_start..end], fmt);
            }
            _ => {
                if body_end.is_none() {
                    return Err(WavError::Truncated {
                        chunk: String::from_utf8_lossy(id).into_owned(),
                    }
                    .into());
                }
            }
        }
        // chunks are word aligned
        pos = body_start + size + (size & 1);
    }
    Err(WavError::MissingChunk(if format.is_none() { "fmt " } else { "data" }).into())
}

fn decode_pcm16(data: &[u8], fmt: Format) -> Result<Signal> {
    let frame_bytes = 2 * fmt.channels as usize;
    if !data.len().is_multiple_of(frame_bytes) {
        return Err(WavError::Truncated {
            chunk: "data".into(),
        }
        .into());
    }
    let channels = fmt.channels as f64;
    let samples = data
        .chunks_exact(frame_bytes)
        .map(|frame| {
            frame
                .chunks_exact(2)
                .map(|s| dequantize(i16::from_le_bytes([s[0], s[1]])))
                .sum::<f64>()
                / channels
        })
        .collect();
    Signal::new(samples, fmt.sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn roundtrip(signal: &Signal) -> Signal {
        let mut buf = Vec::new();
        encode(signal, &mut buf).unwrap();
        decode(&buf).unwrap()
    }

    #[test]
    fn quantization_convention() {
        assert_eq!(dequantize(0x7FFF), 32767.0 / 32768.0);
        assert_eq!(quantize(32767.0 / 32768.0), 0x7FFF);
        assert_eq!(quantize(1.0), 0x7FFF);
        assert_eq!(quantize(-1.0), i16::MIN);
        assert_eq!(quantize(5.0), 0x7FFF);
        assert_eq!(quantize(-5.0), i16::MIN);
    }

    #[test]
    fn header_is_44_bytes_for_mono() {
        let s = Signal::new(vec![0.0; 10], 8000).unwrap();
        let mut buf = Vec::new();
        encode(&s, &mut buf).unwrap();
        assert_eq!(buf.len(), 44 + 20);
        assert_eq!(u32_at(&buf, 40), 20);
        assert_eq!(u32_at(&buf, 24), 8000);
    }

    #[test]
    fn roundtrip_within_one_lsb() {
        let s = Signal::new(vec![0.0, 0.5, -0.5, 1.0, -1.0, 0.123456], 44_100).unwrap();
        let back = roundtrip(&s);
        assert_eq!(back.sample_rate(), 44_100);
        for (a, b) in s.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() <= 1.0 / 32768.0);
        }
    }

    #[test]
    fn empty_signal_roundtrip() {
        let s = Signal::new(vec![], 8000).unwrap();
        assert!(roundtrip(&s).is_empty());
    }

    fn stereo_file(frames: &[(i16, i16)]) -> Vec<u8> {
        let data_len = (frames.len() * 4) as u32;
        let mut b = Vec::new();
        b.extend_from_slice(b"RIFF");
        b.extend_from_slice(&(36 + data_len).to_le_bytes());
        b.extend_from_slice(b"WAVEfmt ");
        b.extend_from_slice(&16u32.to_le_bytes());
        b.extend_from_slice(&1u16.to_le_bytes());
        b.extend_from_slice(&2u16.to_le_bytes());
        b.extend_from_slice(&8000u32.to_le_bytes());
        b.extend_from_slice(&32000u32.to_le_bytes());
        b.extend_from_slice(&4u16.to_le_bytes());
        b.extend_from_slice(&16u16.to_le_bytes());
        // an unrelated odd-sized chunk before data
        b.extend_from_slice(b"LIST");
        b.extend_from_slice(&3u32.to_le_bytes());
        b.extend_from_slice(&[1, 2, 3, 0]);
        b.extend_from_slice(b"data");
        b.extend_from_slice(&data_len.to_le_bytes());
        for (l, r) in frames {
            b.extend_from_slice(&l.to_le_bytes());
            b.extend_from_slice(&r.to_le_bytes());
        }
        b
    }

    #[test]
    fn stereo_is_downmixed() {
        let s = decode(&stereo_file(&[(16384, 0), (-32768, -32768)])).unwrap();
        assert_eq!(s.samples(), &[0.25, -1.0]);
    }

    #[test]
    fn non_wav_is_header_error() {
        let err = decode(b"this is not a wav file at all").unwrap_err();
        assert!(matches!(
            err,
            Error::Wav(WavError::Header { chunk: "RIFF", .. })
        ));
        let err = decode(b"RIFF\0\0\0\0AVI LIST").unwrap_err();
        assert!(matches!(
            err,
            Error::Wav(WavError::Header { chunk: "WAVE", .. })
        ));
        assert!(matches!(
            decode(b"RIF").unwrap_err(),
            Error::Wav(WavError::Header { .. })
        ));
    }

    #[test]
    fn unsupported_codec_named() {
        let mut b = stereo_file(&[(0, 0)]);
        b[20] = 3; // IEEE float
        let err = decode(&b).unwrap_err();
        assert!(matches!(
            err,
            Error::Wav(WavError::UnsupportedCodec { format_tag: 3, .. })
        ));
        assert!(err.to_string().contains("fmt "));
    }

    #[test]
    fn truncated_data_named() {
        let mut b = stereo_file(&[(1, 2), (3, 4)]);
        b.truncate(b.len() - 3);
        let err = decode(&b).unwrap_err();
        match err {
            Error::Wav(WavError::Truncated { chunk }) => assert_eq!(chunk, "data"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_fmt_before_data() {
        let mut b = Vec::new();
        b.extend_from_slice(b"RIFF\x0c\0\0\0WAVEdata\0\0\0\0");
        assert!(matches!(
            decode(&b).unwrap_err(),
            Error::Wav(WavError::MissingChunk("fmt "))
        ));
    }
}
