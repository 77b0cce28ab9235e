use std::io::{self, Write};

use super::{green_for_level, Modality, StimulusProfile, BLUE, RED};
use crate::error::{Error, Result};

pub const DEFAULT_FPS: u32 = 30;

/// One solid-colour frame of the visual QA stimulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisualFrame {
    pub index: usize,
    pub time_ms: f64,
    pub level: f64,
    pub rgb: [u8; 3],
}

/// Frames of a visual stimulus. Pixels are produced on demand since every
/// frame is a single flat colour.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    pub width: u32,
    pub height: u32,
    pub fps: u32,
    pub frames: Vec<VisualFrame>,
}

impl FrameSequence {
    /// Binary PPM (`P6`) encoding of one frame.
    pub fn write_ppm<W: Write>(&self, frame: &VisualFrame, mut out: W) -> io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let row: Vec<u8> = frame
            .rgb
            .iter()
            .copied()
            .cycle()
            .take(self.width as usize * 3)
            .collect();
        for _ in 0..self.height {
            out.write_all(&row)?;
        }
        Ok(())
    }

    pub fn ppm_bytes(&self, frame: &VisualFrame) -> Vec<u8> {
        let mut buf = Vec::with_capacity(16 + (self.width * self.height * 3) as usize);
        self.write_ppm(frame, &mut buf).expect("writing to a Vec");
        buf
    }

    /// File name for frame `index`, `frame_%06d.ppm`.
    pub fn file_name(index: usize) -> String {
        format!("frame_{index:06}.ppm")
    }
}

/// Renders the visual stimulus: frame `k` shows RGB `(20, green(level(k/fps)), 12)`.
pub fn render_visual(
    profile: &StimulusProfile,
    fps: u32,
    width: u32,
    height: u32,
) -> Result<FrameSequence> {
    profile.require(Modality::Visual)?;
    profile.validate()?;
    if fps == 0 || width == 0 || height == 0 {
        return Err(Error::InvalidParameter(
            "fps, width and height must be positive".into(),
        ));
    }
    let count = (profile.duration_ms * fps as u64 / 1000) as usize;
    let frames = (0..count)
        .map(|k| {
            let time_ms = crate::signal::sample_offset_ms(k, fps as f64);
            let level = profile.level_at(time_ms);
            VisualFrame {
                index: k,
                time_ms,
                level,
                rgb: [RED, green_for_level(level), BLUE],
            }
        })
        .collect();
    Ok(FrameSequence {
        width,
        height,
        fps,
        frames,
    })
}
