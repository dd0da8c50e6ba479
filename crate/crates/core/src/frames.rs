//! Frame and key-state containers, PNG I/O and exposure timing.
//!
//! Pixel values live in `[0, 1]`. Loading maps an 8-bit code `v` to
//! `v / 255`; saving rounds back to the nearest code, so any frame that
//! came from an 8-bit image round-trips exactly.

use std::path::{Path, PathBuf};

use image::{ColorType, ImageBuffer, Rgb};
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};

/// An RGB image with row-major interleaved channels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Frame {
    pub const CHANNELS: usize = 3;

    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * Self::CHANNELS {
            return Err(Error::invalid(format!(
                "frame data length {} does not match {}x{}x3",
                data.len(),
                width,
                height
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite pixel value {v}")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// A frame filled with one colour.
    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Build a frame by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [f64; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Clamp every channel into `[0, 1]`.
    pub fn clamp_unit(&mut self) {
        for v in &mut self.data {
            *v = v.clamp(0.0, 1.0);
        }
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len().max(1) as f64
    }

    /// Rec.601 luma plane.
    pub fn luma(&self) -> Vec<f64> {
        self.data
            .chunks_exact(3)
            .map(|p| 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2])
            .collect()
    }

    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        let data = bytes.iter().map(|&b| f64::from(b) / 255.0).collect();
        Self::new(width, height, data)
    }

    /// Quantize to 8-bit codes (round to nearest, clamped).
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }
}

/// How file values relate to the internal value space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueSpace {
    /// Internal values equal the normalized file codes.
    #[default]
    Direct,
    /// Files are gamma-2.2 encoded; internal values are linear light.
    Gamma22,
}

const GAMMA: f64 = 2.2;

pub fn load_frame(path: impl AsRef<Path>) -> Result<Frame> {
    load_frame_in(path, ValueSpace::Direct)
}

pub fn load_frame_in(path: impl AsRef<Path>, space: ValueSpace) -> Result<Frame> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let img = image::load_from_memory(&bytes).map_err(|e| match e {
        image::ImageError::Unsupported(u) => Error::UnsupportedFormat {
            path: path.to_path_buf(),
            message: u.to_string(),
        },
        other => Error::Image {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })?;
    if img.width() == 0 || img.height() == 0 {
        return Err(Error::EmptyImage(path.to_path_buf()));
    }
    let rgb = match img.color() {
        ColorType::Rgb8 | ColorType::Rgba8 | ColorType::L8 | ColorType::La8 => img.to_rgb8(),
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                message: format!("expected an 8-bit image, found {other:?}"),
            })
        }
    };
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let mut frame = Frame::from_rgb8(w, h, rgb.as_raw())?;
    if space == ValueSpace::Gamma22 {
        for v in frame.data_mut() {
            *v = v.powf(GAMMA);
        }
    }
    Ok(frame)
}

pub fn save_frame(frame: &Frame, path: impl AsRef<Path>) -> Result<()> {
    save_frame_in(frame, path, ValueSpace::Direct)
}

pub fn save_frame_in(frame: &Frame, path: impl AsRef<Path>, space: ValueSpace) -> Result<()> {
    let path = path.as_ref();
    let bytes = match space {
        ValueSpace::Direct => frame.to_rgb8(),
        ValueSpace::Gamma22 => {
            let mut encoded = frame.clone();
            for v in encoded.data_mut() {
                *v = v.clamp(0.0, 1.0).powf(1.0 / GAMMA);
            }
            encoded.to_rgb8()
        }
    };
    let buf: ImageBuffer<Rgb<u8>, Vec<u8>> =
        ImageBuffer::from_raw(frame.width() as u32, frame.height() as u32, bytes)
            .ok_or_else(|| Error::invalid("frame buffer size mismatch"))?;
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::Image {
                path: path.to_path_buf(),
                message: other.to_string(),
            },
        })
}

/// Start and end states of a sharp frame: both are the frame itself.
pub fn key_states_identity(frame: &Frame) -> (&Frame, &Frame) {
    (frame, frame)
}

/// Exposure timing over one shutter period normalized to unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExposureConfig {
    t0: f64,
    t1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pattern: Option<(u32, u32)>,
}

impl ExposureConfig {
    const SUM_TOL: f64 = 1e-9;

    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite()) || t0 <= 0.0 || t1 < 0.0 {
            return Err(Error::invalid(format!(
                "exposure (t0={t0}, t1={t1}) needs t0 > 0 and t1 >= 0"
            )));
        }
        if (t0 + t1 - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::invalid(format!(
                "exposure fractions must sum to 1, got {}",
                t0 + t1
            )));
        }
        Ok(Self {
            t0,
            t1,
            pattern: None,
        })
    }

    /// `m` exposed frames followed by `n` dropped frames per period.
    pub fn from_pattern(m: u32, n: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m must be at least 1"));
        }
        let total = f64::from(m + n);
        Ok(Self {
            t0: f64::from(m) / total,
            t1: f64::from(n) / total,
            pattern: Some((m, n)),
        })
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        Ok(Self {
            t0: 1.0 / (1.0 + lambda),
            t1: lambda / (1.0 + lambda),
            pattern: None,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn pattern(&self) -> Option<(u32, u32)> {
        self.pattern
    }

    pub fn lambda(&self) -> f64 {
        self.t1 / self.t0
    }
}

/// Instantaneous states at the start and end of two consecutive exposures.
#[derive(Debug, Clone)]
pub struct KeyStateQuad {
    pub l0: Frame,
    pub l1: Frame,
    pub l2: Frame,
    pub l3: Frame,
    times: Option<[f64; 4]>,
}

impl KeyStateQuad {
    pub fn new(l0: Frame, l1: Frame, l2: Frame, l3: Frame) -> Result<Self> {
        let dims = l0.dims();
        for f in [&l1, &l2, &l3] {
            check_dims(dims, f.dims())?;
        }
        Ok(Self {
            l0,
            l1,
            l2,
            l3,
            times: None,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.l0.dims()
    }

    /// Fix the timestamps `(0, t0, 1, 1 + t0)` from a recovered ratio.
    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.set_lambda(lambda)?;
        Ok(self)
    }

    pub fn set_lambda(&mut self, lambda: f64) -> Result<()> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
        }
        let t0 = 1.0 / (1.0 + lambda);
        self.times = Some([0.0, t0, 1.0, 1.0 + t0]);
        Ok(())
    }

    pub fn times(&self) -> Option<[f64; 4]> {
        self.times
    }

    pub fn t0(&self) -> Option<f64> {
        self.times.map(|t| t[1] - t[0])
    }

    pub fn t1(&self) -> Option<f64> {
        self.times.map(|t| t[2] - t[1])
    }
}

pub fn start_state_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("{index:06}_s.png"))
}

pub fn end_state_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("{index:06}_e.png"))
}

/// Assemble `(L0, L1, L2, L3)` from the start/end states of input frames
/// `index` and `index + 1`.
pub fn import_key_states(dir: impl AsRef<Path>, index: usize) -> Result<KeyStateQuad> {
    import_key_states_in(dir, index, ValueSpace::Direct)
}

pub fn import_key_states_in(
    dir: impl AsRef<Path>,
    index: usize,
    space: ValueSpace,
) -> Result<KeyStateQuad> {
    let dir = dir.as_ref();
    let l0 = load_frame_in(start_state_path(dir, index), space)?;
    let l1 = load_frame_in(end_state_path(dir, index), space)?;
    let l2 = load_frame_in(start_state_path(dir, index + 1), space)?;
    let l3 = load_frame_in(end_state_path(dir, index + 1), space)?;
    KeyStateQuad::new(l0, l1, l2, l3)
}

pub fn export_key_states(
    dir: impl AsRef<Path>,
    index: usize,
    start: &Frame,
    end: &Frame,
) -> Result<()> {
    let dir = dir.as_ref();
    save_frame(start, start_state_path(dir, index))?;
    save_frame(end, end_state_path(dir, index))
}

/// Number of consecutive key-state pairs `0, 1, 2, ...` present in `dir`.
pub fn count_key_states(dir: impl AsRef<Path>) -> usize {
    let dir = dir.as_ref();
    (0..)
        .take_while(|&i| start_state_path(dir, i).is_file() && end_state_path(dir, i).is_file())
        .count()
}
