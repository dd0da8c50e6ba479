//! Dense displacement fields.
//!
//! Every [`FlowField`] carries the key-state whose pixel grid its vectors
//! start from (`anchor`) and the time interval it spans. Operations that
//! combine fields check both dimensions and anchors, because a field on the
//! wrong grid or with the wrong sign is otherwise indistinguishable from a
//! correct one.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{check_dims, Error, Result};
use crate::frames::Frame;

/// A labelled instant: one of the four key-states or an absolute time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Mark {
    #[default]
    Unset,
    L0,
    L1,
    L2,
    L3,
    Time(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Span {
    pub from: Mark,
    pub to: Mark,
}

impl Span {
    pub fn new(from: Mark, to: Mark) -> Self {
        Self { from, to }
    }

    pub fn reversed(self) -> Self {
        Self {
            from: self.to,
            to: self.from,
        }
    }
}

/// Per-pixel `(u, v)` displacements in pixels, row-major and interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: usize,
    height: usize,
    pub anchor: Mark,
    pub span: Span,
    data: Vec<f64>,
}

impl FlowField {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * 2 {
            return Err(Error::invalid(format!(
                "flow data length {} does not match {}x{}x2",
                data.len(),
                width,
                height
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite displacement {v}")));
        }
        Ok(Self {
            width,
            height,
            anchor: Mark::Unset,
            span: Span::default(),
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::constant(width, height, [0.0, 0.0])
    }

    pub fn constant(width: usize, height: usize, uv: [f64; 2]) -> Self {
        let mut data = Vec::with_capacity(width * height * 2);
        for _ in 0..width * height {
            data.extend_from_slice(&uv);
        }
        Self {
            width,
            height,
            anchor: Mark::Unset,
            span: Span::default(),
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 2]) -> Self {
        let mut data = Vec::with_capacity(width * height * 2);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
            }
        }
        Self {
            width,
            height,
            anchor: Mark::Unset,
            span: Span::default(),
            data,
        }
    }

    /// Builder-style anchor and span assignment.
    pub fn tagged(mut self, anchor: Mark, from: Mark, to: Mark) -> Self {
        self.anchor = anchor;
        self.span = Span::new(from, to);
        self
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

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, x: usize, y: usize) -> [f64; 2] {
        let i = (y * self.width + x) * 2;
        [self.data[i], self.data[i + 1]]
    }

    pub fn set(&mut self, x: usize, y: usize, uv: [f64; 2]) {
        let i = (y * self.width + x) * 2;
        self.data[i] = uv[0];
        self.data[i + 1] = uv[1];
    }

    pub fn vectors(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.data.chunks_exact(2).map(|c| [c[0], c[1]])
    }

    fn with_data(&self, data: Vec<f64>) -> Self {
        Self {
            width: self.width,
            height: self.height,
            anchor: self.anchor,
            span: self.span,
            data,
        }
    }

    /// Elementwise map over vectors, keeping anchor and span.
    pub fn map(&self, f: impl Fn([f64; 2]) -> [f64; 2] + Sync) -> Self {
        let mut data = vec![0.0; self.data.len()];
        data.par_chunks_mut(2)
            .zip(self.data.par_chunks(2))
            .for_each(|(o, i)| {
                let r = f([i[0], i[1]]);
                o[0] = r[0];
                o[1] = r[1];
            });
        self.with_data(data)
    }

    /// Elementwise combination of two same-sized fields; keeps `self`'s tags.
    pub fn zip_map(&self, other: &FlowField, f: impl Fn([f64; 2], [f64; 2]) -> [f64; 2] + Sync) -> Result<Self> {
        check_dims(self.dims(), other.dims())?;
        let mut data = vec![0.0; self.data.len()];
        data.par_chunks_mut(2)
            .zip(self.data.par_chunks(2).zip(other.data.par_chunks(2)))
            .for_each(|(o, (a, b))| {
                let r = f([a[0], a[1]], [b[0], b[1]]);
                o[0] = r[0];
                o[1] = r[1];
            });
        Ok(self.with_data(data))
    }

    pub fn neg(&self) -> Self {
        self.map(|[u, v]| [-u, -v])
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|[u, v]| [s * u, s * v])
    }

    pub fn add(&self, other: &FlowField) -> Result<Self> {
        self.zip_map(other, |a, b| [a[0] + b[0], a[1] + b[1]])
    }

    pub fn sub(&self, other: &FlowField) -> Result<Self> {
        self.zip_map(other, |a, b| [a[0] - b[0], a[1] - b[1]])
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.vectors().map(|[u, v]| u.hypot(v)).collect()
    }

    /// Largest absolute component difference against `other`.
    pub fn max_abs_diff(&self, other: &FlowField) -> Result<f64> {
        check_dims(self.dims(), other.dims())?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Sum of per-pixel L1 norms of `self - other`.
    pub fn l1_distance(&self, other: &FlowField) -> Result<f64> {
        check_dims(self.dims(), other.dims())?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .sum())
    }
}

pub(crate) fn check_anchor(a: &FlowField, b: &FlowField, what: &str) -> Result<()> {
    if a.anchor != b.anchor {
        return Err(Error::AnchorMismatch(format!(
            "{what}: {:?} vs {:?}",
            a.anchor, b.anchor
        )));
    }
    Ok(())
}

/// Per-pixel weights in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ConfidenceMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::invalid("confidence map length mismatch"));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("confidence {v} outside [0, 1]")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn to_frame(&self) -> Frame {
        Frame::from_fn(self.width, self.height, |x, y| [self.get(x, y); 3])
    }
}

// ---------------------------------------------------------------------------
// Middlebury .flo
// ---------------------------------------------------------------------------

pub const FLO_MAGIC: f32 = 202021.25;
const FLO_HEADER: usize = 12;

pub fn encode_flo(field: &FlowField) -> Result<Vec<u8>> {
    let (w, h) = field.dims();
    let wi = i32::try_from(w).map_err(|_| Error::Flo(format!("width {w} too large")))?;
    let hi = i32::try_from(h).map_err(|_| Error::Flo(format!("height {h} too large")))?;
    let mut out = Vec::with_capacity(FLO_HEADER + field.data.len() * 4);
    out.extend_from_slice(&FLO_MAGIC.to_le_bytes());
    out.extend_from_slice(&wi.to_le_bytes());
    out.extend_from_slice(&hi.to_le_bytes());
    for &v in &field.data {
        let f = v as f32;
        if !f.is_finite() {
            return Err(Error::Flo(format!("value {v} not representable")));
        }
        out.extend_from_slice(&f.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_flo(bytes: &[u8]) -> Result<FlowField> {
    if bytes.len() < FLO_HEADER {
        return Err(Error::Flo(format!("truncated header ({} bytes)", bytes.len())));
    }
    let word = |i: usize| -> [u8; 4] { bytes[i..i + 4].try_into().unwrap() };
    let magic = f32::from_le_bytes(word(0));
    if magic.to_bits() != FLO_MAGIC.to_bits() {
        return Err(Error::Flo(format!("bad magic {magic}")));
    }
    let w = i32::from_le_bytes(word(4));
    let h = i32::from_le_bytes(word(8));
    if w <= 0 || h <= 0 {
        return Err(Error::Flo(format!("invalid dimensions {w}x{h}")));
    }
    let (w, h) = (w as usize, h as usize);
    let payload = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::Flo(format!("dimensions {w}x{h} overflow")))?;
    let body = &bytes[FLO_HEADER..];
    if body.len() < payload {
        return Err(Error::Flo(format!(
            "truncated payload: {} bytes, expected {payload}",
            body.len()
        )));
    }
    if body.len() > payload {
        return Err(Error::Flo(format!(
            "{} trailing bytes after payload",
            body.len() - payload
        )));
    }
    let data: Vec<f64> = body
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())))
        .collect();
    FlowField::new(w, h, data).map_err(|e| Error::Flo(e.to_string()))
}

pub fn read_flo(path: impl AsRef<Path>) -> Result<FlowField> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_flo(&bytes)
}

pub fn write_flo(field: &FlowField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_flo(field)?;
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Displacement algebra
// ---------------------------------------------------------------------------

/// `(S01, S12) = (-f10, f12)`, both on the anchor grid of the inputs.
pub fn displacements_from_flows(f10: &FlowField, f12: &FlowField) -> Result<(FlowField, FlowField)> {
    check_dims(f10.dims(), f12.dims())?;
    check_anchor(f10, f12, "displacements_from_flows")?;
    let mut s01 = f10.neg();
    s01.span = f10.span.reversed();
    Ok((s01, f12.clone()))
}

/// Second-interval motion of the anchor grid's pixels: `f13 - f12`.
pub fn compose_s23(f13: &FlowField, f12: &FlowField) -> Result<FlowField> {
    check_dims(f13.dims(), f12.dims())?;
    check_anchor(f13, f12, "compose_s23")?;
    let mut out = f13.sub(f12)?;
    out.span = Span::new(f12.span.to, f13.span.to);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// A row-major interleaved raster that can be resampled.
pub trait Raster: Sized {
    fn dims(&self) -> (usize, usize);
    fn channels(&self) -> usize;
    fn values(&self) -> &[f64];
    fn with_values(&self, values: Vec<f64>) -> Result<Self>;
}

impl Raster for Frame {
    fn dims(&self) -> (usize, usize) {
        Frame::dims(self)
    }

    fn channels(&self) -> usize {
        3
    }

    fn values(&self) -> &[f64] {
        self.data()
    }

    fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Frame::new(self.width(), self.height(), values)
    }
}

impl Raster for FlowField {
    fn dims(&self) -> (usize, usize) {
        FlowField::dims(self)
    }

    fn channels(&self) -> usize {
        2
    }

    fn values(&self) -> &[f64] {
        &self.data
    }

    fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Ok(self.with_data(values))
    }
}

/// Bilinear sample at a continuous position, clamping to the border.
/// Writes `channels` values into `out`.
pub(crate) fn sample_bilinear(
    values: &[f64],
    (w, h): (usize, usize),
    channels: usize,
    x: f64,
    y: f64,
    out: &mut [f64],
) {
    let xc = x.clamp(0.0, (w - 1) as f64);
    let yc = y.clamp(0.0, (h - 1) as f64);
    let x0 = xc.floor() as usize;
    let y0 = yc.floor() as usize;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = xc - x0 as f64;
    let fy = yc - y0 as f64;
    let i00 = (y0 * w + x0) * channels;
    let i10 = (y0 * w + x1) * channels;
    let i01 = (y1 * w + x0) * channels;
    let i11 = (y1 * w + x1) * channels;
    for c in 0..channels {
        let top = values[i00 + c] * (1.0 - fx) + values[i10 + c] * fx;
        let bottom = values[i01 + c] * (1.0 - fx) + values[i11 + c] * fx;
        out[c] = top * (1.0 - fy) + bottom * fy;
    }
}

/// `output(p) = input(p + sampler(p))`, bilinear with clamp-to-edge.
pub fn backward_warp_field<R: Raster>(input: &R, sampler: &FlowField) -> Result<R> {
    let dims = input.dims();
    check_dims(dims, sampler.dims())?;
    let (w, _) = dims;
    let ch = input.channels();
    let src = input.values();
    let mut out = vec![0.0; src.len()];
    if w > 0 {
        out.par_chunks_mut(w * ch).enumerate().for_each(|(y, row)| {
            for x in 0..w {
                let [u, v] = sampler.get(x, y);
                sample_bilinear(
                    src,
                    dims,
                    ch,
                    x as f64 + u,
                    y as f64 + v,
                    &mut row[x * ch..(x + 1) * ch],
                );
            }
        });
    }
    input.with_values(out)
}

// ---------------------------------------------------------------------------
// Visualization
// ---------------------------------------------------------------------------

/// HSV with hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [f64; 3] {
    let h = h.rem_euclid(360.0) / 60.0;
    let c = v * s;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let m = v - c;
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    [r + m, g + m, b + m]
}

fn percentile_99(mut mags: Vec<f64>) -> f64 {
    if mags.is_empty() {
        return 0.0;
    }
    mags.sort_by(f64::total_cmp);
    let rank = ((0.99 * mags.len() as f64).ceil() as usize).clamp(1, mags.len());
    mags[rank - 1]
}

/// Colour-wheel rendering: hue encodes direction, saturation encodes
/// magnitude relative to `max_mag` (default: 99th percentile magnitude).
pub fn flow_to_color(field: &FlowField, max_mag: Option<f64>) -> Frame {
    let max_mag = max_mag.unwrap_or_else(|| percentile_99(field.magnitudes()));
    Frame::from_fn(field.width(), field.height(), |x, y| {
        let [u, v] = field.get(x, y);
        let mag = u.hypot(v);
        if max_mag <= 0.0 || mag == 0.0 {
            return [1.0; 3];
        }
        let hue = v.atan2(u) * 180.0 / PI;
        hsv_to_rgb(hue, (mag / max_mag).min(1.0), 1.0)
    })
}
