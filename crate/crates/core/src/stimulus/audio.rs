use std::io::Cursor;

use super::{frequency_for_level, Modality, StimulusProfile};
use crate::error::{Error, Result};

pub const DEFAULT_SAMPLE_RATE_HZ: u32 = 44_100;

/// Peak amplitude as a fraction of full scale.
pub const AUDIO_AMPLITUDE: f64 = 0.8;

/// Mono 16-bit PCM.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub sample_rate_hz: u32,
    pub samples: Vec<i16>,
}

impl AudioClip {
    /// Canonical 44-byte-header RIFF/WAVE encoding.
    pub fn to_wav_bytes(&self) -> Vec<u8> {
        let spec = hound::WavSpec {
            channels: 1,
            sample_rate: self.sample_rate_hz,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut cursor = Cursor::new(Vec::with_capacity(44 + 2 * self.samples.len()));
        {
            let mut writer = hound::WavWriter::new(&mut cursor, spec).expect("in-memory WAV");
            let mut samples = writer.get_i16_writer(self.samples.len() as u32);
            for &s in &self.samples {
                samples.write_sample(s);
            }
            samples.flush().expect("in-memory WAV");
            writer.finalize().expect("in-memory WAV");
        }
        cursor.into_inner()
    }

    pub fn from_wav_bytes(bytes: &[u8]) -> Result<Self> {
        let mut reader =
            hound::WavReader::new(Cursor::new(bytes)).map_err(|e| Error::Parse(e.to_string()))?;
        let spec = reader.spec();
        if spec.channels != 1 || spec.bits_per_sample != 16 {
            return Err(Error::Parse("expected 16-bit mono WAV".into()));
        }
        let samples = reader
            .samples::<i16>()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Self {
            sample_rate_hz: spec.sample_rate,
            samples,
        })
    }
}

/// Triangle value for a phase in `[0, 1)`: -1 at 0, +1 at 0.5.
fn triangle(phase: f64) -> f64 {
    1.0 - 4.0 * (phase - 0.5).abs()
}

/// Renders the auditory stimulus as a phase-continuous triangle oscillator
/// whose frequency follows `50 + 420 * level(t)` Hz.
///
/// Sample `n` is `round(0.8 * 32767 * tri(phase_n))`, after which the phase
/// advances by `f(t_n) / sample_rate` and wraps to `[0, 1)`.
pub fn render_audio(profile: &StimulusProfile, sample_rate_hz: u32) -> Result<AudioClip> {
    profile.require(Modality::Auditory)?;
    profile.validate()?;
    if sample_rate_hz == 0 {
        return Err(Error::InvalidParameter("sample rate must be positive".into()));
    }
    let count = (profile.duration_ms * sample_rate_hz as u64 / 1000) as usize;
    let rate = sample_rate_hz as f64;
    let scale = AUDIO_AMPLITUDE * i16::MAX as f64;
    let mut phase = 0.0f64;
    let samples = (0..count)
        .map(|n| {
            let t_ms = crate::signal::sample_offset_ms(n, rate);
            let sample = (scale * triangle(phase)).round() as i16;
            phase += frequency_for_level(profile.level_at(t_ms)) / rate;
            phase -= phase.floor();
            sample
        })
        .collect();
    Ok(AudioClip {
        sample_rate_hz,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stimulus::ControlPoint;

    fn constant(level: f64, ms: u64) -> StimulusProfile {
        StimulusProfile::from_points(
            "a",
            Modality::Auditory,
            0,
            0.0,
            vec![
                ControlPoint { time_ms: 0, level },
                ControlPoint { time_ms: ms, level },
            ],
        )
        .unwrap()
    }

    /// Frequency from the spacing of interpolated zero crossings.
    fn zero_crossing_hz(samples: &[i16], rate: f64) -> f64 {
        let mut crossings = Vec::new();
        for (i, w) in samples.windows(2).enumerate() {
            let (a, b) = (w[0] as f64, w[1] as f64);
            if (a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0) {
                crossings.push(i as f64 + a / (a - b));
            }
        }
        let span = crossings[crossings.len() - 1] - crossings[0];
        (crossings.len() - 1) as f64 / 2.0 / (span / rate)
    }

    #[test]
    fn constant_levels_hit_expected_pitch() {
        for (level, hz, tol) in [(0.0, 50.0, 1.0), (1.0, 470.0, 2.0), (0.5, 260.0, 2.0)] {
            let clip = render_audio(&constant(level, 1000), 44_100).unwrap();
            assert_eq!(clip.samples.len(), 44_100);
            let est = zero_crossing_hz(&clip.samples, 44_100.0);
            assert!((est - hz).abs() <= tol, "level {level}: {est} Hz");
        }
    }

    #[test]
    fn amplitude_is_bounded() {
        let clip = render_audio(&constant(0.3, 500), 44_100).unwrap();
        let peak = clip.samples.iter().map(|s| s.unsigned_abs()).max().unwrap();
        assert!(peak as f64 <= AUDIO_AMPLITUDE * 32767.0 + 0.5);
        assert!(peak as f64 >= AUDIO_AMPLITUDE * 32767.0 * 0.99);
    }

    #[test]
    fn wav_round_trip() {
        let clip = render_audio(&constant(0.2, 100), 8_000).unwrap();
        let bytes = clip.to_wav_bytes();
        assert_eq!(&bytes[..4], b"RIFF");
        assert_eq!(bytes.len(), 44 + 2 * clip.samples.len());
        assert_eq!(AudioClip::from_wav_bytes(&bytes).unwrap(), clip);
    }

    #[test]
    fn visual_profile_is_rejected() {
        let mut p = constant(0.5, 100);
        p.modality = Modality::Visual;
        assert_eq!(
            render_audio(&p, 44_100).unwrap_err().kind(),
            "modality_mismatch"
        );
    }
}
