//! Trajectory-consistent correction of the composed second-interval flow.
//!
//! Under constant acceleration `(2 / lambda) S12 - S01 = S23`, so given
//! `lambda` and the two short-range flows the long-range displacement has a
//! closed-form target `T = (2 / lambda) f12 + f10`. The composed estimate is
//! pulled towards `T` with a per-pixel weight that is high only where the
//! raw field already points the same way and lies close to the target.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Result};
use crate::flow::{check_anchor, compose_s23, displacements_from_flows, ConfidenceMap, FlowField, Mark, Span};
use crate::trajectory::{check_lambda, estimate_lambda, LambdaEstimate, LambdaOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefineOptions {
    /// Distance scale of the blend weight, pixels.
    pub tau_px: f64,
    /// Targets shorter than this are left unrefined.
    pub mag_floor: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            tau_px: 4.0,
            mag_floor: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JointOptions {
    pub lambda: LambdaOptions,
    pub refine: RefineOptions,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for JointOptions {
    fn default() -> Self {
        Self {
            lambda: LambdaOptions::default(),
            refine: RefineOptions::default(),
            max_iters: 8,
            tol: 1e-4,
        }
    }
}

/// `(2 / lambda) f12 + f10`.
pub fn refinement_target(f10: &FlowField, f12: &FlowField, lambda: f64) -> Result<FlowField> {
    check_dims(f10.dims(), f12.dims())?;
    check_anchor(f10, f12, "refinement_target")?;
    check_lambda(lambda)?;
    let k = 2.0 / lambda;
    let mut out = f12.zip_map(f10, |b, a| [k * b[0] + a[0], k * b[1] + a[1]])?;
    out.span = Span::new(f12.span.to, Mark::Unset);
    Ok(out)
}

#[inline]
fn blend_pixel(raw: [f64; 2], target: [f64; 2], opts: &RefineOptions) -> ([f64; 2], f64) {
    let t2 = target[0] * target[0] + target[1] * target[1];
    if t2.sqrt() < opts.mag_floor {
        return (raw, 0.0);
    }
    let r2 = raw[0] * raw[0] + raw[1] * raw[1];
    let cos = if r2 == 0.0 {
        0.0
    } else {
        // sqrt(r2 * t2) == r2 when raw == target, so the fixed point is exact
        (raw[0] * target[0] + raw[1] * target[1]) / (r2 * t2).sqrt()
    };
    let dist = (raw[0] - target[0]).hypot(raw[1] - target[1]);
    let w = cos.clamp(0.0, 1.0) * (-dist / opts.tau_px).exp();
    (
        [w * target[0] + (1.0 - w) * raw[0], w * target[1] + (1.0 - w) * raw[1]],
        w,
    )
}

/// Blend the composed field towards the trajectory target.
pub fn refine_s23(
    f10: &FlowField,
    f12: &FlowField,
    s23_raw: &FlowField,
    lambda: f64,
    opts: &RefineOptions,
) -> Result<(FlowField, ConfidenceMap)> {
    check_dims(f10.dims(), s23_raw.dims())?;
    check_anchor(f10, s23_raw, "refine_s23")?;
    let target = refinement_target(f10, f12, lambda)?;
    let n = s23_raw.len();
    let mut out = vec![0.0; n * 2];
    let mut weights = vec![0.0; n];
    out.par_chunks_mut(2)
        .zip(weights.par_iter_mut())
        .zip(s23_raw.data().par_chunks(2).zip(target.data().par_chunks(2)))
        .for_each(|((o, w), (r, t))| {
            let (v, wt) = blend_pixel([r[0], r[1]], [t[0], t[1]], opts);
            o.copy_from_slice(&v);
            *w = wt;
        });
    let (width, height) = s23_raw.dims();
    let mut refined = FlowField::new(width, height, out)?;
    refined.anchor = s23_raw.anchor;
    refined.span = s23_raw.span;
    Ok((refined, ConfidenceMap::new(width, height, weights)?))
}

/// Result of alternating ratio estimation and refinement.
#[derive(Debug, Clone)]
pub struct JointEstimate {
    pub estimate: LambdaEstimate,
    pub s23: FlowField,
    pub confidence: ConfidenceMap,
}

/// Alternate `lambda` estimation and `S23` refinement until the ratio
/// settles. Sign-alternating updates are damped by averaging with the
/// previous ratio.
pub fn joint_estimate(
    f10: &FlowField,
    f12: &FlowField,
    f13: &FlowField,
    opts: &JointOptions,
) -> Result<JointEstimate> {
    let (s01, s12) = displacements_from_flows(f10, f12)?;
    let mut s23 = compose_s23(f13, f12)?;
    let mut estimate = estimate_lambda(&s01, &s12, &s23, &opts.lambda)?;
    let (w, h) = s23.dims();
    let mut confidence = ConfidenceMap::new(w, h, vec![0.0; w * h])?;
    let mut lambda = estimate.lambda;
    let mut last_delta = 0.0f64;
    let mut converged = opts.max_iters == 0;
    let mut iterations = 0;

    for k in 1..=opts.max_iters {
        let (refined, conf) = refine_s23(f10, f12, &s23, lambda, &opts.refine)?;
        s23 = refined;
        confidence = conf;
        estimate = estimate_lambda(&s01, &s12, &s23, &opts.lambda)?;
        iterations = k;
        let mut next = estimate.lambda;
        let delta = next - lambda;
        if delta * last_delta < 0.0 {
            next = 0.5 * (next + lambda);
        }
        let step = (next - lambda).abs();
        last_delta = delta;
        lambda = next;
        if step < opts.tol {
            converged = true;
            break;
        }
    }

    if estimate.lambda != lambda {
        let t0 = 1.0 / (1.0 + lambda);
        estimate.lambda = lambda;
        estimate.t0 = t0;
        estimate.t1 = lambda * t0;
    }
    estimate.converged = converged;
    estimate.iterations = iterations;
    Ok(JointEstimate {
        estimate,
        s23,
        confidence,
    })
}
