//! Ground-truth generation.
//!
//! Three sources of test data:
//!
//! - [`BlurSynth`] turns a high-rate sharp sequence into a low-rate blurry
//!   one by averaging `m` consecutive frames and dropping the next `n`.
//! - [`sample_uneven`] keeps single sharp frames with alternating gaps.
//! - [`SceneSpec`] describes textured discs moving with constant
//!   acceleration over a textured static background; frames and flows are
//!   rendered analytically at any real time.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{FlowField, Mark};
use crate::frames::{export_key_states, save_frame, Frame, KeyStateQuad};
use crate::synthesis::{FlowTriple, QuadFlows};

// ---------------------------------------------------------------------------
// Blur synthesis
// ---------------------------------------------------------------------------

/// Mean of equally sized frames.
///
/// Each value is averaged from an exact floating-point expansion of the sum,
/// with one correction step on the quotient, so the result is within one ULP
/// of the true mean. Inputs are sorted first, which makes the result
/// independent of frame order; identical inputs average to themselves.
pub fn mean_frames(frames: &[Frame]) -> Result<Frame> {
    let first = frames
        .first()
        .ok_or_else(|| Error::invalid("cannot average an empty frame set"))?;
    for f in frames {
        crate::error::check_dims(first.dims(), f.dims())?;
    }
    let m = frames.len();
    let len = first.data().len();
    let mut out = vec![0.0; len];
    out.par_chunks_mut(1024).enumerate().for_each(|(chunk, dst)| {
        let mut vals = vec![0.0; m];
        let mut partials = Vec::with_capacity(8);
        for (k, o) in dst.iter_mut().enumerate() {
            let i = chunk * 1024 + k;
            for (v, f) in vals.iter_mut().zip(frames) {
                *v = f.data()[i];
            }
            vals.sort_by(f64::total_cmp);
            *o = exact_mean(&vals, &mut partials).clamp(vals[0], vals[m - 1]);
        }
    });
    Frame::new(first.width(), first.height(), out)
}

/// Add `x` to a non-overlapping expansion without rounding error.
fn grow_expansion(partials: &mut Vec<f64>, mut x: f64) {
    let mut kept = 0;
    for j in 0..partials.len() {
        let mut y = partials[j];
        if x.abs() < y.abs() {
            std::mem::swap(&mut x, &mut y);
        }
        let hi = x + y;
        let lo = y - (hi - x);
        if lo != 0.0 {
            partials[kept] = lo;
            kept += 1;
        }
        x = hi;
    }
    partials.truncate(kept);
    partials.push(x);
}

fn expansion_value(partials: &[f64]) -> f64 {
    partials.iter().rev().fold(0.0, |acc, &p| acc + p)
}

fn exact_mean(vals: &[f64], partials: &mut Vec<f64>) -> f64 {
    partials.clear();
    for &v in vals {
        grow_expansion(partials, v);
    }
    let m = vals.len() as f64;
    let q = expansion_value(partials) / m;
    // residual sum - q * m, formed exactly with a fused multiply-add
    let p = q * m;
    let e = q.mul_add(m, -p);
    grow_expansion(partials, -p);
    grow_expansion(partials, -e);
    q + expansion_value(partials) / m
}

/// Number of blurry frames produced from `len` sharp frames.
pub fn blur_output_count(len: usize, m: usize, n: usize) -> usize {
    if m == 0 || len < m {
        0
    } else {
        (len - m) / (m + n) + 1
    }
}

/// Ratio implied by using the first and last averaged frames as key-states:
/// the exposure spans `m - 1` frame steps and the gap `n + 1`.
pub fn discrete_lambda(m: usize, n: usize) -> Option<f64> {
    (m > 1).then(|| (n + 1) as f64 / (m - 1) as f64)
}

/// One low-rate period: the blurry frame and its sharp sources.
#[derive(Debug, Clone)]
pub struct BlurPeriod {
    pub blurry: Frame,
    /// The `m` averaged frames; the first and last are the key-states.
    pub sources: Vec<Frame>,
}

impl BlurPeriod {
    pub fn start(&self) -> &Frame {
        &self.sources[0]
    }

    pub fn end(&self) -> &Frame {
        self.sources.last().expect("period holds at least one frame")
    }
}

/// Streaming blur synthesis over a sequence of frames; holds at most `m`
/// source frames at a time.
pub struct BlurSynth<I> {
    source: I,
    m: usize,
    n: usize,
    emitted: usize,
    done: bool,
}

impl<I: Iterator<Item = Result<Frame>>> BlurSynth<I> {
    pub fn new(source: I, m: usize, n: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::invalid("m must be at least 1"));
        }
        Ok(Self {
            source,
            m,
            n,
            emitted: 0,
            done: false,
        })
    }
}

impl<I: Iterator<Item = Result<Frame>>> Iterator for BlurSynth<I> {
    type Item = Result<BlurPeriod>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.emitted > 0 {
            for _ in 0..self.n {
                match self.source.next() {
                    Some(Ok(_)) => {}
                    Some(Err(e)) => {
                        self.done = true;
                        return Some(Err(e));
                    }
                    None => {
                        self.done = true;
                        return None;
                    }
                }
            }
        }
        let mut sources = Vec::with_capacity(self.m);
        while sources.len() < self.m {
            match self.source.next() {
                Some(Ok(f)) => sources.push(f),
                Some(Err(e)) => {
                    self.done = true;
                    return Some(Err(e));
                }
                None => {
                    self.done = true;
                    if self.emitted == 0 {
                        return Some(Err(Error::invalid(format!(
                            "sequence of {} frames is shorter than m = {}",
                            sources.len(),
                            self.m
                        ))));
                    }
                    return None;
                }
            }
        }
        self.emitted += 1;
        Some(mean_frames(&sources).map(|blurry| BlurPeriod { blurry, sources }))
    }
}

/// In-memory convenience wrapper around [`BlurSynth`].
pub fn synth_blur_dataset(frames: &[Frame], m: usize, n: usize) -> Result<Vec<BlurPeriod>> {
    BlurSynth::new(frames.iter().cloned().map(Ok), m, n)?.collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema: u32,
    pub m: usize,
    pub n: usize,
    pub fps_in: f64,
    pub fps_out: f64,
    /// `t1 / t0` implied by the first/last key-state convention.
    pub discrete_lambda: Option<f64>,
    /// Nominal `n / m`, the continuous-exposure ratio.
    pub nominal_lambda: f64,
    pub periods: usize,
}

/// Write `blur/`, `gt/` and `manifest.json` under `out`.
pub fn write_blur_dataset<I>(frames: I, m: usize, n: usize, fps_in: f64, out: &Path) -> Result<DatasetManifest>
where
    I: Iterator<Item = Result<Frame>>,
{
    let blur_dir = out.join("blur");
    let gt_dir = out.join("gt");
    for d in [&blur_dir, &gt_dir] {
        std::fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    let mut periods = 0;
    for (k, period) in BlurSynth::new(frames, m, n)?.enumerate() {
        let period = period?;
        save_frame(&period.blurry, blur_dir.join(format!("{k:06}.png")))?;
        export_key_states(&gt_dir, k, period.start(), period.end())?;
        for (j, f) in period.sources.iter().enumerate() {
            save_frame(f, gt_dir.join(format!("{k:06}_{j:02}.png")))?;
        }
        periods += 1;
    }
    let manifest = DatasetManifest {
        schema: 1,
        m,
        n,
        fps_in,
        fps_out: fps_in / (m + n) as f64,
        discrete_lambda: discrete_lambda(m, n),
        nominal_lambda: n as f64 / m as f64,
        periods,
    };
    let path = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Uneven sampling
// ---------------------------------------------------------------------------

/// Indices `0, ga+1, ga+gb+2, 2ga+gb+3, ...` below `len`.
pub fn uneven_indices(len: usize, gap_a: usize, gap_b: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    let mut k = 0;
    while i < len {
        out.push(i);
        i += if k % 2 == 0 { gap_a + 1 } else { gap_b + 1 };
        k += 1;
    }
    out
}

/// Keep one frame, skip `gap_a`, keep one, skip `gap_b`, and so on.
pub fn sample_uneven<T: Clone>(frames: &[T], gap_a: usize, gap_b: usize) -> Result<Vec<T>> {
    let idx = uneven_indices(frames.len(), gap_a, gap_b);
    if idx.len() < 4 {
        return Err(Error::invalid(format!(
            "{} frames give only {} samples with gaps ({gap_a}, {gap_b}); 4 required",
            frames.len(),
            idx.len()
        )));
    }
    Ok(idx.into_iter().map(|i| frames[i].clone()).collect())
}

// ---------------------------------------------------------------------------
// Analytic scenes
// ---------------------------------------------------------------------------

/// Smooth value noise coloured around a base colour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Texture {
    pub seed: u64,
    /// Lattice spacing of the coarse octave, pixels.
    #[serde(default = "default_cell")]
    pub cell: f64,
    /// Peak-to-peak amplitude around the base colour.
    #[serde(default = "default_contrast")]
    pub contrast: f64,
    /// Base colour; derived from the seed when absent.
    #[serde(default)]
    pub base: Option<[f64; 3]>,
}

fn default_cell() -> f64 {
    16.0
}

fn default_contrast() -> f64 {
    0.5
}

impl Texture {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            cell: default_cell(),
            contrast: default_contrast(),
            base: None,
        }
    }

    pub fn flat(rgb: [f64; 3]) -> Self {
        Self {
            seed: 0,
            cell: default_cell(),
            contrast: 0.0,
            base: Some(rgb),
        }
    }

    fn base_color(&self) -> [f64; 3] {
        self.base.unwrap_or_else(|| {
            let mut c = [0.0; 3];
            for (ch, v) in c.iter_mut().enumerate() {
                *v = 0.25 + 0.5 * unit_hash(self.seed, 0xba5e + ch as u64, 0, 0);
            }
            c
        })
    }

    /// Colour at a continuous position in texture coordinates.
    pub fn sample(&self, x: f64, y: f64) -> [f64; 3] {
        let base = self.base_color();
        if self.contrast == 0.0 {
            return base;
        }
        let mut out = [0.0; 3];
        for (ch, o) in out.iter_mut().enumerate() {
            let salt = self.seed.wrapping_mul(31).wrapping_add(ch as u64 * 7919);
            let coarse = value_noise(salt, x / self.cell, y / self.cell);
            let fine = value_noise(salt ^ 0x5eed, 2.0 * x / self.cell, 2.0 * y / self.cell);
            let n = 0.7 * coarse + 0.3 * fine;
            *o = (base[ch] + self.contrast * (n - 0.5)).clamp(0.0, 1.0);
        }
        out
    }
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn unit_hash(seed: u64, salt: u64, ix: i64, iy: i64) -> f64 {
    let h = mix64(
        seed.wrapping_add(mix64(salt))
            .wrapping_add(mix64(ix as u64).rotate_left(17))
            .wrapping_add(mix64(iy as u64 ^ 0x9e37_79b9_7f4a_7c15)),
    );
    (h >> 11) as f64 / (1u64 << 53) as f64
}

fn quintic(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

fn value_noise(salt: u64, x: f64, y: f64) -> f64 {
    let (xf, yf) = (x.floor(), y.floor());
    let (ix, iy) = (xf as i64, yf as i64);
    let (fx, fy) = (quintic(x - xf), quintic(y - yf));
    let v00 = unit_hash(salt, 1, ix, iy);
    let v10 = unit_hash(salt, 1, ix + 1, iy);
    let v01 = unit_hash(salt, 1, ix, iy + 1);
    let v11 = unit_hash(salt, 1, ix + 1, iy + 1);
    let top = v00 + (v10 - v00) * fx;
    let bottom = v01 + (v11 - v01) * fx;
    top + (bottom - top) * fy
}

/// A textured disc moving with constant acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sprite {
    pub texture: Texture,
    pub radius: f64,
    /// Centre at `t = 0`, pixels.
    pub position: [f64; 2],
    /// Pixels per period.
    pub velocity: [f64; 2],
    /// Pixels per period squared.
    pub acceleration: [f64; 2],
}

impl Sprite {
    pub fn center(&self, t: f64) -> [f64; 2] {
        let h = 0.5 * t * t;
        [
            self.position[0] + self.velocity[0] * t + self.acceleration[0] * h,
            self.position[1] + self.velocity[1] * t + self.acceleration[1] * h,
        ]
    }

    /// Range of one centre coordinate over `[lo, hi]`.
    fn extent(&self, axis: usize, lo: f64, hi: f64) -> (f64, f64) {
        let mut ts = vec![lo, hi];
        let a = self.acceleration[axis];
        if a != 0.0 {
            let vertex = -self.velocity[axis] / a;
            if vertex > lo && vertex < hi {
                ts.push(vertex);
            }
        }
        ts.iter()
            .map(|&t| self.center(t)[axis])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), v| (mn.min(v), mx.max(v)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub background: Texture,
    pub sprites: Vec<Sprite>,
    #[serde(default = "default_supersample")]
    pub supersample: usize,
    /// Times at which the scene may be evaluated, in periods.
    pub window: (f64, f64),
}

fn default_supersample() -> usize {
    4
}

impl SceneSpec {
    /// Sprites must keep their whole disc inside the image over the window.
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("scene has zero size"));
        }
        if self.supersample == 0 {
            return Err(Error::invalid("supersample must be at least 1"));
        }
        let (lo, hi) = self.window;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::invalid(format!("bad scene window ({lo}, {hi})")));
        }
        let limits = [self.width as f64 - 1.0, self.height as f64 - 1.0];
        for (i, s) in self.sprites.iter().enumerate() {
            if s.radius.is_nan() || s.radius <= 0.0 {
                return Err(Error::invalid(format!("sprite {i} needs a positive radius")));
            }
            for (axis, &limit) in limits.iter().enumerate() {
                let (mn, mx) = s.extent(axis, lo, hi);
                if mn < s.radius || mx > limit - s.radius {
                    return Err(Error::invalid(format!(
                        "sprite {i} leaves the image along axis {axis} within window ({lo}, {hi})"
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.window;
        if !t.is_finite() || t < lo - 1e-9 || t > hi + 1e-9 {
            return Err(Error::OutOfDomain { t, lo, hi });
        }
        Ok(())
    }

    /// Topmost sprite covering a point at time `t`.
    fn sprite_at(&self, x: f64, y: f64, t: f64) -> Option<(usize, [f64; 2])> {
        self.sprites.iter().enumerate().rev().find_map(|(i, s)| {
            let c = s.center(t);
            let (dx, dy) = (x - c[0], y - c[1]);
            (dx * dx + dy * dy <= s.radius * s.radius).then_some((i, c))
        })
    }

    fn color_at(&self, x: f64, y: f64, t: f64) -> [f64; 3] {
        match self.sprite_at(x, y, t) {
            Some((i, c)) => self.sprites[i].texture.sample(x - c[0], y - c[1]),
            None => self.background.sample(x, y),
        }
    }

    /// A random valid scene. Sprites are placed by rejection sampling.
    pub fn random(seed: u64, width: usize, height: usize, sprites: usize, window: (f64, f64)) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = SceneSpec {
            width,
            height,
            background: Texture {
                seed: rng.random(),
                cell: 16.0,
                contrast: 0.4,
                base: None,
            },
            sprites: Vec::new(),
            supersample: default_supersample(),
            window,
        };
        let min_side = width.min(height) as f64;
        let mut attempts = 0;
        while spec.sprites.len() < sprites {
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::invalid("could not place sprites inside the scene"));
            }
            let radius = rng.random_range(0.08..0.16) * min_side;
            let speed = 0.25 * min_side;
            let sprite = Sprite {
                texture: Texture {
                    seed: rng.random(),
                    cell: rng.random_range(16.0..24.0),
                    contrast: 0.5,
                    base: None,
                },
                radius,
                position: [
                    rng.random_range(radius..width as f64 - radius),
                    rng.random_range(radius..height as f64 - radius),
                ],
                velocity: [rng.random_range(-speed..speed), rng.random_range(-speed..speed)],
                acceleration: [
                    rng.random_range(-speed..speed),
                    rng.random_range(-speed..speed),
                ],
            };
            spec.sprites.push(sprite);
            if spec.validate().is_err() {
                spec.sprites.pop();
            }
        }
        Ok(spec)
    }
}

/// Render the scene at time `t` with `supersample^2` box-filtered samples.
pub fn gen_scene_frame(spec: &SceneSpec, t: f64) -> Result<Frame> {
    spec.validate()?;
    spec.check_time(t)?;
    let (w, h) = (spec.width, spec.height);
    let s = spec.supersample;
    let offsets: Vec<f64> = (0..s).map(|i| (i as f64 + 0.5) / s as f64 - 0.5).collect();
    let norm = 1.0 / (s * s) as f64;
    let mut data = vec![0.0; w * h * 3];
    data.par_chunks_mut(w * 3).enumerate().for_each(|(y, row)| {
        for x in 0..w {
            let mut acc = [0.0; 3];
            for &oy in &offsets {
                for &ox in &offsets {
                    let c = spec.color_at(x as f64 + ox, y as f64 + oy, t);
                    for k in 0..3 {
                        acc[k] += c[k];
                    }
                }
            }
            for k in 0..3 {
                row[x * 3 + k] = (acc[k] * norm).clamp(0.0, 1.0);
            }
        }
    });
    Frame::new(w, h, data)
}

/// Average of `samples` instants evenly covering `[start, start + duration]`.
pub fn gen_scene_exposure(spec: &SceneSpec, start: f64, duration: f64, samples: usize) -> Result<Frame> {
    let samples = samples.max(1);
    let frames: Vec<Frame> = (0..samples)
        .map(|i| {
            let t = if samples == 1 {
                start
            } else {
                start + duration * i as f64 / (samples - 1) as f64
            };
            gen_scene_frame(spec, t)
        })
        .collect::<Result<_>>()?;
    mean_frames(&frames)
}

/// Exact motion of the surface visible at each pixel centre at `t_from`.
pub fn gen_scene_flow(spec: &SceneSpec, t_from: f64, t_to: f64) -> Result<FlowField> {
    spec.validate()?;
    spec.check_time(t_from)?;
    spec.check_time(t_to)?;
    let field = FlowField::from_fn(spec.width, spec.height, |x, y| {
        match spec.sprite_at(x as f64, y as f64, t_from) {
            Some((i, c0)) => {
                let c1 = spec.sprites[i].center(t_to);
                [c1[0] - c0[0], c1[1] - c0[1]]
            }
            None => [0.0, 0.0],
        }
    });
    Ok(field.tagged(Mark::Time(t_from), Mark::Time(t_from), Mark::Time(t_to)))
}

/// Absolute times of `(L0, L1, L2, L3)` for the quad starting at period `k`.
pub fn quad_times(k: usize, t0: f64) -> [f64; 4] {
    let base = k as f64;
    [base, base + t0, base + 1.0, base + 1.0 + t0]
}

/// Instantaneous key-states and exact flows for quad `k` of a scene with
/// exposure fraction `t0`.
pub fn scene_quad(spec: &SceneSpec, k: usize, t0: f64) -> Result<(KeyStateQuad, QuadFlows)> {
    let [a, b, c, d] = quad_times(k, t0);
    let quad = KeyStateQuad::new(
        gen_scene_frame(spec, a)?,
        gen_scene_frame(spec, b)?,
        gen_scene_frame(spec, c)?,
        gen_scene_frame(spec, d)?,
    )?;
    Ok((quad, scene_quad_flows(spec, k, t0)?))
}

pub fn scene_quad_flows(spec: &SceneSpec, k: usize, t0: f64) -> Result<QuadFlows> {
    let [a, b, c, d] = quad_times(k, t0);
    let fwd = |to: f64, mark: Mark| -> Result<FlowField> {
        Ok(gen_scene_flow(spec, b, to)?.tagged(Mark::L1, Mark::L1, mark))
    };
    let bwd = |to: f64, mark: Mark| -> Result<FlowField> {
        Ok(gen_scene_flow(spec, c, to)?.tagged(Mark::L2, Mark::L2, mark))
    };
    Ok(QuadFlows {
        forward: FlowTriple {
            to_prev: fwd(a, Mark::L0)?,
            to_next: fwd(c, Mark::L2)?,
            to_next2: fwd(d, Mark::L3)?,
        },
        backward: FlowTriple {
            to_prev: bwd(d, Mark::L3)?,
            to_next: bwd(b, Mark::L1)?,
            to_next2: bwd(a, Mark::L0)?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(v: f64) -> Frame {
        Frame::filled(4, 3, [v; 3])
    }

    #[test]
    fn identical_frames_average_exactly() {
        for v in [0.1, 0.3, 1.0 / 3.0, 0.7, 1.0] {
            let frames = vec![gray(v); 7];
            assert_eq!(mean_frames(&frames).unwrap(), gray(v));
        }
    }

    #[test]
    fn averaging_is_order_free() {
        let frames: Vec<Frame> = (0..6).map(|i| gray(0.1 + 0.13 * i as f64)).collect();
        let mut rev = frames.clone();
        rev.reverse();
        rev.swap(1, 4);
        assert_eq!(mean_frames(&frames).unwrap(), mean_frames(&rev).unwrap());
        let expect = frames.iter().map(|f| f.data()[0]).sum::<f64>() / 6.0;
        assert!((mean_frames(&frames).unwrap().data()[0] - expect).abs() <= 2.0 * f64::EPSILON);
    }

    #[test]
    fn output_count_formula_brute_force() {
        for len in 0..=100 {
            for m in 1..=10 {
                for n in 0..=10 {
                    let frames: Vec<Result<Frame>> = (0..len).map(|_| Ok(gray(0.5))).collect();
                    let synth = BlurSynth::new(frames.into_iter(), m, n).unwrap();
                    let produced: Vec<_> = synth.collect();
                    if len < m {
                        assert_eq!(produced.len(), 1);
                        assert!(produced[0].is_err());
                    } else {
                        assert!(produced.iter().all(|p| p.is_ok()));
                        assert_eq!(produced.len(), blur_output_count(len, m, n), "{len} {m} {n}");
                        assert_eq!(produced.len(), (len - m) / (m + n) + 1);
                    }
                }
            }
        }
    }

    #[test]
    fn period_covers_expected_indices() {
        let frames: Vec<Frame> = (0..30).map(|i| gray(i as f64 / 100.0)).collect();
        let periods = synth_blur_dataset(&frames, 9, 1).unwrap();
        assert_eq!(periods.len(), 3);
        assert_eq!(periods[1].start(), &frames[10]);
        assert_eq!(periods[1].end(), &frames[18]);
        assert!((periods[1].blurry.data()[0] - 0.14).abs() < 1e-15);
        assert!((discrete_lambda(9, 1).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(discrete_lambda(1, 0), None);
        assert!(BlurSynth::new(std::iter::empty(), 0, 1).is_err());
    }

    #[test]
    fn uneven_sampling() {
        assert_eq!(&uneven_indices(21, 6, 2), &[0, 7, 10, 17, 20]);
        let v: Vec<usize> = (0..8).collect();
        assert_eq!(sample_uneven(&v, 0, 0).unwrap(), v);
        assert_eq!(sample_uneven(&(0..16).collect::<Vec<_>>(), 4, 4).unwrap(), vec![0, 5, 10, 15]);
        assert!(sample_uneven(&(0..10).collect::<Vec<_>>(), 6, 2).is_err());
    }

    fn spec_one_sprite() -> SceneSpec {
        SceneSpec {
            width: 64,
            height: 48,
            background: Texture::new(3),
            sprites: vec![Sprite {
                texture: Texture::new(9),
                radius: 8.0,
                position: [20.0, 24.0],
                velocity: [10.0, 0.0],
                acceleration: [4.0, 0.0],
            }],
            supersample: 2,
            window: (-1.0, 2.0),
        }
    }

    #[test]
    fn sprite_kinematics() {
        let s = spec_one_sprite();
        let c = s.sprites[0].center(0.7);
        assert!((c[0] - 20.0 - 7.98).abs() < 1e-12);
        assert_eq!(c[1], 24.0);
    }

    #[test]
    fn validation_catches_escaping_sprites() {
        let mut s = spec_one_sprite();
        assert!(s.validate().is_ok());
        s.sprites[0].velocity = [40.0, 0.0];
        assert!(s.validate().is_err());
        assert!(gen_scene_frame(&s, 0.0).is_err());
        let s = spec_one_sprite();
        assert!(matches!(gen_scene_frame(&s, 2.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn frames_are_deterministic() {
        let s = spec_one_sprite();
        assert_eq!(gen_scene_frame(&s, 0.37).unwrap(), gen_scene_frame(&s, 0.37).unwrap());
    }

    #[test]
    fn zero_span_flow_is_zero() {
        let s = spec_one_sprite();
        let f = gen_scene_flow(&s, 0.4, 0.4).unwrap();
        assert!(f.vectors().all(|v| v == [0.0, 0.0]));
        let g = gen_scene_flow(&s, 0.0, 0.7).unwrap();
        assert!((g.get(20, 24)[0] - 7.98).abs() < 1e-12);
        assert_eq!(g.get(2, 2), [0.0, 0.0]);
    }

    #[test]
    fn random_scene_is_valid() {
        let s = SceneSpec::random(7, 96, 96, 3, (0.0, 3.0)).unwrap();
        assert_eq!(s.sprites.len(), 3);
        s.validate().unwrap();
        assert_eq!(s, SceneSpec::random(7, 96, 96, 3, (0.0, 3.0)).unwrap());
    }
}
