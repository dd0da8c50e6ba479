//! Frame rendering from key-states and motion models.
//!
//! Each source frame is forward-splatted with bilinear weights to the
//! requested time, normalized, cross-filled from the other source where it
//! has holes, and the two are blended by temporal proximity.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::flow::{compose_s23, displacements_from_flows, FlowField, Mark, Span};
use crate::frames::{ExposureConfig, Frame, KeyStateQuad};
use crate::refine::{joint_estimate, refine_s23, JointOptions};
use crate::trajectory::{
    estimate_lambda, eval_displacement, fit_trajectory, schedule_timestamps, LambdaEstimate,
    QviTrajectory, SlotKind, TrajectoryField,
};

/// Accumulated weight below which a splatted pixel is a hole.
pub const W_FLOOR: f64 = 1e-3;

/// Rows per accumulation band. Fixed so the summation order does not
/// depend on the thread count.
const BAND_ROWS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SplatResult {
    pub width: usize,
    pub height: usize,
    pub accum: Vec<f64>,
    pub weight: Vec<f64>,
}

impl SplatResult {
    /// Normalized colours and a validity mask.
    pub fn normalize(&self, w_floor: f64) -> (Vec<f64>, Vec<bool>) {
        let n = self.width * self.height;
        let mut out = vec![0.0; n * 3];
        let mut valid = vec![false; n];
        for i in 0..n {
            let w = self.weight[i];
            if w >= w_floor {
                valid[i] = true;
                for c in 0..3 {
                    out[i * 3 + c] = self.accum[i * 3 + c] / w;
                }
            }
        }
        (out, valid)
    }
}

/// Deposit every source pixel at `p + flow(p)` into its four neighbours.
pub fn forward_splat(src: &Frame, flow: &FlowField) -> Result<SplatResult> {
    check_dims(src.dims(), flow.dims())?;
    let (w, h) = src.dims();
    let bands: Vec<(usize, Vec<f64>, Vec<f64>)> = (0..h.div_ceil(BAND_ROWS))
        .into_par_iter()
        .map(|b| splat_band(src, flow, b * BAND_ROWS, ((b + 1) * BAND_ROWS).min(h)))
        .collect();
    let mut accum = vec![0.0; w * h * 3];
    let mut weight = vec![0.0; w * h];
    for (row0, acc, wt) in bands {
        let base = row0 * w;
        for (i, v) in wt.iter().enumerate() {
            weight[base + i] += v;
        }
        for (i, v) in acc.iter().enumerate() {
            accum[base * 3 + i] += v;
        }
    }
    Ok(SplatResult {
        width: w,
        height: h,
        accum,
        weight,
    })
}

/// Splat rows `[y_lo, y_hi)` into a buffer covering only the target rows
/// they reach. Returns the first covered row and the buffers.
fn splat_band(src: &Frame, flow: &FlowField, y_lo: usize, y_hi: usize) -> (usize, Vec<f64>, Vec<f64>) {
    let (w, h) = src.dims();
    let (mut r_lo, mut r_hi) = (h as i64, -1i64);
    for y in y_lo..y_hi {
        for x in 0..w {
            let ty = (y as f64 + flow.get(x, y)[1]).floor() as i64;
            r_lo = r_lo.min(ty.max(0));
            r_hi = r_hi.max((ty + 1).min(h as i64 - 1));
        }
    }
    if r_hi < r_lo {
        return (0, Vec::new(), Vec::new());
    }
    let (r_lo, r_hi) = (r_lo as usize, r_hi as usize);
    let rows = r_hi - r_lo + 1;
    let mut acc = vec![0.0; rows * w * 3];
    let mut wt = vec![0.0; rows * w];
    for y in y_lo..y_hi {
        for x in 0..w {
            let [u, v] = flow.get(x, y);
            let tx = x as f64 + u;
            let ty = y as f64 + v;
            let (fx0, fy0) = (tx.floor(), ty.floor());
            let (fx, fy) = (tx - fx0, ty - fy0);
            let (x0, y0) = (fx0 as i64, fy0 as i64);
            let px = src.pixel(x, y);
            for (dx, dy, k) in [
                (0, 0, (1.0 - fx) * (1.0 - fy)),
                (1, 0, fx * (1.0 - fy)),
                (0, 1, (1.0 - fx) * fy),
                (1, 1, fx * fy),
            ] {
                let (sx, sy) = (x0 + dx, y0 + dy);
                if k == 0.0 || sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                    continue;
                }
                let i = (sy as usize - r_lo) * w + sx as usize;
                wt[i] += k;
                for c in 0..3 {
                    acc[i * 3 + c] += k * px[c];
                }
            }
        }
    }
    (r_lo, acc, wt)
}

/// Fill invalid pixels from the nearest valid one (4-connected breadth-first).
fn fill_nearest(data: &mut [f64], valid: &mut [bool], w: usize, h: usize) {
    let mut queue: VecDeque<usize> = (0..w * h).filter(|&i| valid[i]).collect();
    if queue.is_empty() {
        return;
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % w, i / w);
        let mut visit = |j: usize| {
            if !valid[j] {
                valid[j] = true;
                for c in 0..3 {
                    data[j * 3 + c] = data[i * 3 + c];
                }
                queue.push_back(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < w {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - w);
        }
        if y + 1 < h {
            visit(i + w);
        }
    }
}

/// Splat both sources, cross-fill holes and blend `(1 - tau) a + tau b`.
///
/// `tau` is expected in `[0, 1]`.
pub fn render_pair(a: &Frame, flow_a: &FlowField, b: &Frame, flow_b: &FlowField, tau: f64) -> Result<Frame> {
    check_dims(a.dims(), b.dims())?;
    let (w, h) = a.dims();
    let (ca, va) = forward_splat(a, flow_a)?.normalize(W_FLOOR);
    let (cb, vb) = forward_splat(b, flow_b)?.normalize(W_FLOOR);
    let mut out = vec![0.0; w * h * 3];
    let mut valid = vec![false; w * h];
    for i in 0..w * h {
        let px = &mut out[i * 3..i * 3 + 3];
        match (va[i], vb[i]) {
            (true, true) if tau >= 1.0 => px.copy_from_slice(&cb[i * 3..i * 3 + 3]),
            (true, true) => {
                // a + tau (b - a) keeps equal sources exact
                for c in 0..3 {
                    let a = ca[i * 3 + c];
                    px[c] = a + tau * (cb[i * 3 + c] - a);
                }
            }
            (true, false) => px.copy_from_slice(&ca[i * 3..i * 3 + 3]),
            (false, true) => px.copy_from_slice(&cb[i * 3..i * 3 + 3]),
            (false, false) => continue,
        }
        valid[i] = true;
    }
    fill_nearest(&mut out, &mut valid, w, h);
    let mut frame = Frame::new(w, h, out)?;
    frame.clamp_unit();
    Ok(frame)
}

/// A per-pixel motion model anchored at one key-state.
#[derive(Debug, Clone, PartialEq)]
pub enum MotionModel {
    Quadratic(TrajectoryField),
    Qvi(QviTrajectory),
}

impl MotionModel {
    pub fn anchor(&self) -> Mark {
        match self {
            MotionModel::Quadratic(t) => t.anchor,
            MotionModel::Qvi(q) => q.anchor,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            MotionModel::Quadratic(t) => t.domain(),
            MotionModel::Qvi(q) => match q.anchor {
                Mark::L2 => (-(q.t0 + q.t1), q.t0),
                _ => (-q.t0, q.t1 + q.t0),
            },
        }
    }

    /// Displacement `offset` periods after the anchor state.
    pub fn displacement(&self, offset: f64) -> Result<FlowField> {
        match self {
            MotionModel::Quadratic(t) => eval_displacement(t, offset),
            MotionModel::Qvi(q) => q.displacement(offset),
        }
    }

    fn covers(&self, offset: f64) -> bool {
        let (lo, hi) = self.domain();
        offset >= lo - 1e-9 && offset <= hi + 1e-9
    }
}

/// Render the quad at `t` periods after `L1`: `L1` moves along `fwd`, `L2`
/// along `bwd` evaluated at `t - t1`, blended by `clamp(t / t1, 0, 1)`.
pub fn render_intermediate(quad: &KeyStateQuad, fwd: &MotionModel, bwd: &MotionModel, t: f64) -> Result<Frame> {
    let t1 = quad
        .t1()
        .ok_or_else(|| Error::invalid("quad timestamps are not set"))?;
    let (lo, hi) = fwd.domain();
    if !t.is_finite() || t < lo - 1e-9 || t > hi + 1e-9 {
        return Err(Error::OutOfDomain { t, lo, hi });
    }
    let da = fwd.displacement(t)?;
    let db = bwd.displacement(t - t1)?;
    let tau = if t1 > 0.0 { (t / t1).clamp(0.0, 1.0) } else { 1.0 };
    render_pair(&quad.l1, &da, &quad.l2, &db, tau)
}

/// Carry a field defined on `src`'s grid over to `dst`'s grid.
///
/// Every source pixel lands on the site nearest to `p + motion(p)`. When
/// several land on one site, the one whose colour in `src` best matches
/// `dst` at that site wins, which resolves occlusions without depth. Sites
/// nobody reaches take the nearest reached value.
pub fn rebase_field(values: &FlowField, motion: &FlowField, src: &Frame, dst: &Frame, target: Mark) -> Result<FlowField> {
    check_dims(values.dims(), motion.dims())?;
    check_dims(values.dims(), src.dims())?;
    check_dims(src.dims(), dst.dims())?;
    let (w, h) = values.dims();
    let mut best = vec![f64::INFINITY; w * h];
    let mut data = vec![0.0; w * h * 3];
    let mut valid = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let [u, v] = motion.get(x, y);
            let (tx, ty) = ((x as f64 + u).round(), (y as f64 + v).round());
            if tx < 0.0 || ty < 0.0 || tx >= w as f64 || ty >= h as f64 {
                continue;
            }
            let j = ty as usize * w + tx as usize;
            let (a, b) = (src.pixel(x, y), dst.pixel(tx as usize, ty as usize));
            let cost = (a[0] - b[0]).abs() + (a[1] - b[1]).abs() + (a[2] - b[2]).abs();
            if cost < best[j] {
                best[j] = cost;
                let [p, q] = values.get(x, y);
                data[j * 3] = p;
                data[j * 3 + 1] = q;
                valid[j] = true;
            }
        }
    }
    fill_nearest(&mut data, &mut valid, w, h);
    let mut out = FlowField::new(w, h, data.chunks(3).flat_map(|p| [p[0], p[1]]).collect())?;
    out.anchor = target;
    out.span = Span::new(target, values.span.to);
    Ok(out)
}

/// Render inside the exposure `L0..L1` at `s` in `[-t0, 0]` from `L1`.
///
/// `L1` moves along `fwd`. `L0` moves along `l0_motion`, a model anchored
/// on `L0`'s grid (the previous quad's reversed trajectory), when one
/// covers the offset; otherwise `fwd` is carried over to `L0`'s grid with
/// [`rebase_field`].
pub fn render_intra(
    l0: &Frame,
    l1: &Frame,
    fwd: &MotionModel,
    l0_motion: Option<&MotionModel>,
    s: f64,
    t0: f64,
) -> Result<Frame> {
    if t0.is_nan() || t0 <= 0.0 || !s.is_finite() || s < -t0 - 1e-9 || s > 1e-9 {
        return Err(Error::OutOfDomain { t: s, lo: -t0, hi: 0.0 });
    }
    let db = fwd.displacement(s)?;
    let da = match l0_motion {
        Some(m) if m.covers(s + t0) => m.displacement(s + t0)?,
        _ => {
            let to_l0 = fwd.displacement(-t0)?;
            rebase_field(&db.sub(&to_l0)?, &to_l0, l1, l0, Mark::L0)?
        }
    };
    let tau = ((s + t0) / t0).clamp(0.0, 1.0);
    render_pair(l0, &da, l1, &db, tau)
}

/// Render inside the exposure `L2..L3` at `s` in `[0, t0]` from `L2`: `L2`
/// moves along `bwd` and `L3` along `bwd` carried over to its grid.
pub fn render_final_exposure(l2: &Frame, l3: &Frame, bwd: &MotionModel, s: f64, t0: f64) -> Result<Frame> {
    if t0.is_nan() || t0 <= 0.0 || !s.is_finite() || s < -1e-9 || s > t0 + 1e-9 {
        return Err(Error::OutOfDomain { t: s, lo: 0.0, hi: t0 });
    }
    let da = bwd.displacement(s)?;
    let to_l3 = bwd.displacement(t0)?;
    let db = rebase_field(&da.sub(&to_l3)?, &to_l3, l2, l3, Mark::L3)?;
    render_pair(l2, &da, l3, &db, (s / t0).clamp(0.0, 1.0))
}

/// Trajectory of `L2`'s pixels from displacements measured on the reversed
/// sequence `(L3, L2, L1, L0)`. The result is evaluated with ordinary
/// forward-time offsets from `L2`.
pub fn reversed_trajectory(s01_rev: &FlowField, s23_rev: &FlowField, lambda: f64) -> Result<TrajectoryField> {
    let rev = fit_trajectory(s01_rev, s23_rev, lambda)?;
    Ok(TrajectoryField {
        v1: rev.v1.neg(),
        accel: rev.accel,
        lambda,
        anchor: Mark::L2,
    })
}

/// Flows from the middle state of a triple: to the state before it, to the
/// next state and to the one after that. For the forward pass these are
/// `f10, f12, f13` on `L1`; for the reversed pass `f23, f21, f20` on `L2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTriple {
    pub to_prev: FlowField,
    pub to_next: FlowField,
    pub to_next2: FlowField,
}

impl FlowTriple {
    /// `(S01, S12, S23_raw)` on the triple's anchor grid.
    pub fn displacements(&self) -> Result<(FlowField, FlowField, FlowField)> {
        let (s01, s12) = displacements_from_flows(&self.to_prev, &self.to_next)?;
        let s23 = compose_s23(&self.to_next2, &self.to_next)?;
        Ok((s01, s12, s23))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadFlows {
    pub forward: FlowTriple,
    pub backward: FlowTriple,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineOptions {
    pub joint: JointOptions,
    /// Use this ratio instead of estimating it.
    pub lambda_override: Option<f64>,
    pub refine: bool,
    /// Equal-interval motion model (timing still follows the ratio).
    pub qvi: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            joint: JointOptions::default(),
            lambda_override: None,
            refine: true,
            qvi: false,
        }
    }
}

/// A quad with its ratio and both motion models resolved.
#[derive(Debug, Clone)]
pub struct PreparedQuad {
    pub quad: KeyStateQuad,
    pub estimate: LambdaEstimate,
    pub forward: MotionModel,
    pub backward: MotionModel,
}

/// Estimate the ratio for one quad, or take the override.
pub fn resolve_lambda(flows: &QuadFlows, opts: &PipelineOptions) -> Result<LambdaEstimate> {
    if let Some(l) = opts.lambda_override {
        return LambdaEstimate::fixed(l);
    }
    let f = &flows.forward;
    if opts.refine {
        Ok(joint_estimate(&f.to_prev, &f.to_next, &f.to_next2, &opts.joint)?.estimate)
    } else {
        let (s01, s12, s23) = f.displacements()?;
        estimate_lambda(&s01, &s12, &s23, &opts.joint.lambda)
    }
}

/// Build both motion models for a quad with a known ratio.
pub fn prepare_quad_with(
    mut quad: KeyStateQuad,
    flows: &QuadFlows,
    estimate: LambdaEstimate,
    opts: &PipelineOptions,
) -> Result<PreparedQuad> {
    check_dims(quad.dims(), flows.forward.to_prev.dims())?;
    check_dims(quad.dims(), flows.backward.to_prev.dims())?;
    let lambda = estimate.lambda;
    quad.set_lambda(lambda)?;
    let (t0, t1) = (estimate.t0, estimate.t1);

    let model = |triple: &FlowTriple, reversed: bool| -> Result<MotionModel> {
        let (s01, s12, s23_raw) = triple.displacements()?;
        if opts.qvi {
            let mut q = QviTrajectory::new(s01, s12, t0, t1)?;
            if reversed {
                q.anchor = Mark::L2;
            }
            return Ok(MotionModel::Qvi(q));
        }
        let s23 = if opts.refine {
            refine_s23(&triple.to_prev, &triple.to_next, &s23_raw, lambda, &opts.joint.refine)?.0
        } else {
            s23_raw
        };
        Ok(MotionModel::Quadratic(if reversed {
            reversed_trajectory(&s01, &s23, lambda)?
        } else {
            let mut traj = fit_trajectory(&s01, &s23, lambda)?;
            traj.anchor = Mark::L1;
            traj
        }))
    };

    Ok(PreparedQuad {
        forward: model(&flows.forward, false)?,
        backward: model(&flows.backward, true)?,
        quad,
        estimate,
    })
}

pub fn prepare_quad(quad: KeyStateQuad, flows: &QuadFlows, opts: &PipelineOptions) -> Result<PreparedQuad> {
    let estimate = resolve_lambda(flows, opts)?;
    prepare_quad_with(quad, flows, estimate, opts)
}

/// One emitted frame of an interpolated sequence.
#[derive(Debug, Clone)]
pub struct RenderedFrame {
    pub frame: Frame,
    /// Index of the input period the frame belongs to.
    pub period: usize,
    /// Absolute time in periods from the first exposure start.
    pub time: f64,
    pub kind: SlotKind,
    /// True when the frame is a key-state reproduced verbatim.
    pub key_state: bool,
}

/// Streaming renderer over prepared quads.
///
/// Quad `k` covers period `k`: the exposure of input frame `k` (intra
/// timestamps, rendered from `L0` and `L1`) and the gap after it (inter
/// timestamps, rendered from `L1` and `L2`). After the last quad, the
/// exposure of the final input frame is emitted as well.
pub struct SequenceRenderer<I> {
    source: I,
    factor: usize,
    index: usize,
    prev_backward: Option<MotionModel>,
    last: Option<PreparedQuad>,
    pending: VecDeque<RenderedFrame>,
    finished: bool,
}

impl<I: Iterator<Item = Result<PreparedQuad>>> SequenceRenderer<I> {
    pub fn new(source: I, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::invalid("upsample factor must be at least 1"));
        }
        Ok(Self {
            source,
            factor,
            index: 0,
            prev_backward: None,
            last: None,
            pending: VecDeque::new(),
            finished: false,
        })
    }

    fn render_period(
        pq: &PreparedQuad,
        prev_backward: Option<&MotionModel>,
        factor: usize,
        period: usize,
    ) -> Result<Vec<RenderedFrame>> {
        let config = ExposureConfig::from_lambda(pq.estimate.lambda)?;
        let t0 = config.t0();
        let stamps = schedule_timestamps(&config, factor)?;
        stamps
            .par_iter()
            .map(|ts| {
                let frame = match ts.key_state {
                    Some(Mark::L0) => pq.quad.l0.clone(),
                    Some(_) => pq.quad.l1.clone(),
                    None if ts.kind == SlotKind::Intra => {
                        render_intra(&pq.quad.l0, &pq.quad.l1, &pq.forward, prev_backward, ts.t_l1, t0)?
                    }
                    None => render_intermediate(&pq.quad, &pq.forward, &pq.backward, ts.t_l1)?,
                };
                Ok(RenderedFrame {
                    frame,
                    period,
                    time: period as f64 + ts.t,
                    kind: ts.kind,
                    key_state: ts.key_state.is_some(),
                })
            })
            .collect()
    }

    /// Exposure of the input frame after the last quad, from `L2` and `L3`.
    fn render_tail(pq: &PreparedQuad, factor: usize, period: usize) -> Result<Vec<RenderedFrame>> {
        let config = ExposureConfig::from_lambda(pq.estimate.lambda)?;
        let t0 = config.t0();
        let stamps = schedule_timestamps(&config, factor)?;
        stamps
            .par_iter()
            .filter(|ts| ts.kind == SlotKind::Intra)
            .map(|ts| {
                let frame = match ts.key_state {
                    Some(Mark::L0) => pq.quad.l2.clone(),
                    Some(_) => pq.quad.l3.clone(),
                    None => render_final_exposure(&pq.quad.l2, &pq.quad.l3, &pq.backward, ts.t, t0)?,
                };
                Ok(RenderedFrame {
                    frame,
                    period,
                    time: period as f64 + ts.t,
                    kind: ts.kind,
                    key_state: ts.key_state.is_some(),
                })
            })
            .collect()
    }

    fn advance(&mut self) -> Result<()> {
        match self.source.next() {
            Some(Ok(pq)) => {
                let k = self.index;
                if let Some(last) = &self.last {
                    check_dims(last.quad.dims(), pq.quad.dims()).map_err(|e| e.in_quad(k))?;
                }
                let frames = Self::render_period(&pq, self.prev_backward.as_ref(), self.factor, k).map_err(|e| e.in_quad(k))?;
                self.pending.extend(frames);
                self.prev_backward = Some(pq.backward.clone());
                self.last = Some(pq);
                self.index += 1;
                Ok(())
            }
            Some(Err(e)) => {
                self.finished = true;
                Err(e.in_quad(self.index))
            }
            None => {
                self.finished = true;
                if let Some(last) = self.last.take() {
                    let k = self.index;
                    let frames = Self::render_tail(&last, self.factor, k).map_err(|e| e.in_quad(k - 1))?;
                    self.pending.extend(frames);
                }
                Ok(())
            }
        }
    }
}

impl<I: Iterator<Item = Result<PreparedQuad>>> Iterator for SequenceRenderer<I> {
    type Item = Result<RenderedFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(f) = self.pending.pop_front() {
                return Some(Ok(f));
            }
            if self.finished {
                return None;
            }
            if let Err(e) = self.advance() {
                self.pending.clear();
                return Some(Err(e));
            }
        }
    }
}

/// Render a whole sequence of prepared quads.
pub fn interpolate_sequence<I>(quads: I, factor: usize) -> Result<SequenceRenderer<I::IntoIter>>
where
    I: IntoIterator<Item = Result<PreparedQuad>>,
{
    SequenceRenderer::new(quads.into_iter(), factor)
}

/// Manifest entry describing one output frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub file: String,
    pub time: f64,
    pub period: usize,
    pub kind: SlotKind,
    pub key_state: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputManifest {
    pub schema: u32,
    pub factor: usize,
    #[serde(default)]
    pub lambdas: Vec<f64>,
    pub frames: Vec<FrameRecord>,
}

pub fn output_file_name(i: usize) -> String {
    format!("out_{i:06}.png")
}
