//! Exposure-ratio recovery and constant-acceleration trajectories.
//!
//! Time is measured in shutter periods. With the acceleration held constant
//! from `L0` to `L3`, the three displacements of the `L1` grid satisfy
//!
//! ```text
//!   2 S12       = (2 v1 + a t1) t1
//!   S01 + S23   = (2 v1 + a t1) t0
//! ```
//!
//! so `lambda = t1 / t0` is the ratio of `2 S12` to the resultant
//! `S01 + S23`, and the trajectory of `L1`'s pixels is
//! `S1t = a/2 t^2 + v1 t` with `a = (lambda + 1)(S23 - S01)` and
//! `v1 = lambda S01 + (S01 + S23) / 2`, `t` measured from `L1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::flow::{check_anchor, FlowField, Mark, Span};
use crate::frames::ExposureConfig;

const DOMAIN_EPS: f64 = 1e-9;

/// Gates and aggregation settings for [`estimate_lambda`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LambdaOptions {
    /// Minimum resultant magnitude `|S01 + S23|` in pixels.
    pub mag_floor: f64,
    /// Minimum cosine between `S12` and the resultant.
    pub cos_floor: f64,
    pub min_pixels: usize,
    /// Relative band around the estimate that counts towards `confidence`.
    pub inlier_band: f64,
    /// Keep the per-pixel ratio map in the estimate.
    pub keep_ratio_map: bool,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        Self {
            mag_floor: 0.5,
            cos_floor: 0.7,
            min_pixels: 100,
            inlier_band: 0.10,
            keep_ratio_map: false,
        }
    }
}

/// Per-pixel ratios; `None` where the pixel failed a gate.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub lambda: f64,
    pub t0: f64,
    pub t1: f64,
    /// Fraction of gated pixels whose ratio lies within the inlier band.
    pub confidence: f64,
    /// Fraction of all pixels that passed the magnitude and direction gates.
    pub inlier_fraction: f64,
    #[serde(default = "default_true")]
    pub converged: bool,
    #[serde(default)]
    pub iterations: usize,
    #[serde(skip)]
    pub per_pixel_ratio: Option<RatioMap>,
}

fn default_true() -> bool {
    true
}

impl LambdaEstimate {
    /// An estimate fixed by the caller rather than measured.
    pub fn fixed(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self {
            lambda,
            t0: 1.0 / (1.0 + lambda),
            t1: lambda / (1.0 + lambda),
            confidence: 1.0,
            inlier_fraction: 1.0,
            converged: true,
            iterations: 0,
            per_pixel_ratio: None,
        })
    }

    pub fn exposure(&self) -> ExposureConfig {
        ExposureConfig::from_lambda(self.lambda).expect("estimate holds a valid lambda")
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::invalid(format!("lambda must be positive and finite, got {lambda}")));
    }
    Ok(())
}

/// Lower weighted median: the smallest value whose cumulative weight
/// reaches half the total. Input order does not matter.
pub fn weighted_median(samples: &mut [(f64, f64)]) -> Option<f64> {
    samples.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let total: f64 = samples.iter().map(|s| s.1).sum();
    if samples.is_empty() || total <= 0.0 {
        return None;
    }
    let half = 0.5 * total;
    let mut acc = 0.0;
    for &(v, w) in samples.iter() {
        acc += w;
        if acc >= half {
            return Some(v);
        }
    }
    samples.last().map(|s| s.0)
}

/// Ratio of one pixel, or `None` if it fails a gate. Returns `(r, |R|)`.
#[inline]
fn pixel_ratio(s01: [f64; 2], s12: [f64; 2], s23: [f64; 2], opts: &LambdaOptions) -> Option<(f64, f64)> {
    let r = [s01[0] + s23[0], s01[1] + s23[1]];
    let r_mag = r[0].hypot(r[1]);
    let s12_mag = s12[0].hypot(s12[1]);
    if r_mag.is_nan() || r_mag < opts.mag_floor || s12_mag == 0.0 {
        return None;
    }
    let dot = s12[0] * r[0] + s12[1] * r[1];
    if dot / (s12_mag * r_mag) < opts.cos_floor {
        return None;
    }
    Some((2.0 * dot / (r_mag * r_mag), r_mag))
}

/// Recover `lambda = t1 / t0` from the three displacements of one grid.
///
/// Each pixel contributes `2 <S12, d> / |S01 + S23|` with `d` the unit
/// resultant direction, weighted by `|S01 + S23|`; the estimate is the
/// weighted median over pixels passing the magnitude and direction gates.
pub fn estimate_lambda(
    s01: &FlowField,
    s12: &FlowField,
    s23: &FlowField,
    opts: &LambdaOptions,
) -> Result<LambdaEstimate> {
    check_dims(s01.dims(), s12.dims())?;
    check_dims(s01.dims(), s23.dims())?;
    check_anchor(s01, s12, "estimate_lambda")?;
    check_anchor(s01, s23, "estimate_lambda")?;

    let ratios: Vec<Option<(f64, f64)>> = s01
        .data()
        .par_chunks(2)
        .zip(s12.data().par_chunks(2))
        .zip(s23.data().par_chunks(2))
        .map(|((a, b), c)| pixel_ratio([a[0], a[1]], [b[0], b[1]], [c[0], c[1]], opts))
        .collect();

    let mut samples: Vec<(f64, f64)> = ratios.iter().flatten().copied().collect();
    let qualified = samples.len();
    if qualified < opts.min_pixels.max(1) {
        return Err(Error::InsufficientMotion {
            qualified,
            required: opts.min_pixels.max(1),
        });
    }
    let lambda = weighted_median(&mut samples).ok_or(Error::InsufficientMotion {
        qualified: 0,
        required: opts.min_pixels.max(1),
    })?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InsufficientMotion {
            qualified: 0,
            required: opts.min_pixels.max(1),
        });
    }
    let band = opts.inlier_band * lambda;
    let inliers = samples.iter().filter(|s| (s.0 - lambda).abs() <= band).count();

    Ok(LambdaEstimate {
        lambda,
        t0: 1.0 / (1.0 + lambda),
        t1: lambda / (1.0 + lambda),
        confidence: inliers as f64 / qualified as f64,
        inlier_fraction: qualified as f64 / s01.len() as f64,
        converged: true,
        iterations: 0,
        per_pixel_ratio: opts.keep_ratio_map.then(|| RatioMap {
            width: s01.width(),
            height: s01.height(),
            data: ratios.iter().map(|r| r.map(|(v, _)| v)).collect(),
        }),
    })
}

/// Per-pixel quadratic motion of one key-state's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryField {
    /// Velocity at the anchor state, pixels per period.
    pub v1: FlowField,
    /// Acceleration, pixels per period squared.
    pub accel: FlowField,
    pub lambda: f64,
    /// `L1` for the forward trajectory, `L2` for the time-reversed one.
    pub anchor: Mark,
}

impl TrajectoryField {
    pub fn t0(&self) -> f64 {
        1.0 / (1.0 + self.lambda)
    }

    pub fn t1(&self) -> f64 {
        self.lambda / (1.0 + self.lambda)
    }

    /// Offsets from the anchor state that stay within `[L0, L3]`.
    pub fn domain(&self) -> (f64, f64) {
        let (t0, t1) = (self.t0(), self.t1());
        match self.anchor {
            Mark::L2 => (-(t1 + t0), t0),
            _ => (-t0, t1 + t0),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.v1.dims()
    }
}

/// Coefficients of the uneven-interval quadratic from `S01`, `S23` and `lambda`.
pub fn fit_trajectory(s01: &FlowField, s23: &FlowField, lambda: f64) -> Result<TrajectoryField> {
    check_dims(s01.dims(), s23.dims())?;
    check_anchor(s01, s23, "fit_trajectory")?;
    check_lambda(lambda)?;
    let k = lambda + 1.0;
    let mut accel = s23.zip_map(s01, |c, a| [k * (c[0] - a[0]), k * (c[1] - a[1])])?;
    let mut v1 = s01.zip_map(s23, |a, c| {
        [
            lambda * a[0] + 0.5 * (a[0] + c[0]),
            lambda * a[1] + 0.5 * (a[1] + c[1]),
        ]
    })?;
    accel.span = Span::default();
    v1.span = Span::default();
    Ok(TrajectoryField {
        v1,
        accel,
        lambda,
        anchor: s01.anchor,
    })
}

/// Displacement of the anchor grid's pixels `t` periods after the anchor state.
pub fn eval_displacement(traj: &TrajectoryField, t: f64) -> Result<FlowField> {
    let (lo, hi) = traj.domain();
    if !t.is_finite() || t < lo - DOMAIN_EPS || t > hi + DOMAIN_EPS {
        return Err(Error::OutOfDomain { t, lo, hi });
    }
    let half_t2 = 0.5 * t * t;
    let mut out = traj
        .accel
        .zip_map(&traj.v1, |a, v| [a[0] * half_t2 + v[0] * t, a[1] * half_t2 + v[1] * t])?;
    out.anchor = traj.anchor;
    out.span = Span::new(traj.anchor, Mark::Time(t));
    Ok(out)
}

/// Equal-interval quadratic: `(S12 - S01)/2 t^2 + (S12 + S01)/2 t`, with `t`
/// in units of one inter-frame interval.
pub fn qvi_displacement(s01: &FlowField, s12: &FlowField, t: f64) -> Result<FlowField> {
    check_dims(s01.dims(), s12.dims())?;
    let (q, l) = (0.5 * t * t, 0.5 * t);
    let mut out = s12.zip_map(s01, |b, a| {
        [
            (b[0] - a[0]) * q + (b[0] + a[0]) * l,
            (b[1] - a[1]) * q + (b[1] + a[1]) * l,
        ]
    })?;
    out.span = Span::new(s12.anchor, Mark::Time(t));
    Ok(out)
}

/// Equal-interval model placed on an uneven time axis: each of the three
/// intervals `L0-L1`, `L1-L2`, `L2-L3` is treated as one unit, which is
/// what an interpolator that assumes `lambda = 1` effectively does.
#[derive(Debug, Clone, PartialEq)]
pub struct QviTrajectory {
    pub s01: FlowField,
    pub s12: FlowField,
    pub t0: f64,
    pub t1: f64,
    pub anchor: Mark,
}

impl QviTrajectory {
    pub fn new(s01: FlowField, s12: FlowField, t0: f64, t1: f64) -> Result<Self> {
        check_dims(s01.dims(), s12.dims())?;
        check_anchor(&s01, &s12, "qvi trajectory")?;
        if !(t0 > 0.0 && t1 > 0.0) {
            return Err(Error::invalid("qvi trajectory needs positive intervals"));
        }
        let anchor = s01.anchor;
        Ok(Self {
            s01,
            s12,
            t0,
            t1,
            anchor,
        })
    }

    fn unit_time(&self, offset: f64) -> f64 {
        // reversed-time offset for the L2-anchored model
        let r = if self.anchor == Mark::L2 { -offset } else { offset };
        if r < 0.0 {
            r / self.t0
        } else if r <= self.t1 {
            r / self.t1
        } else {
            1.0 + (r - self.t1) / self.t0
        }
    }

    pub fn displacement(&self, offset: f64) -> Result<FlowField> {
        let (lo, hi) = match self.anchor {
            Mark::L2 => (-(self.t1 + self.t0), self.t0),
            _ => (-self.t0, self.t1 + self.t0),
        };
        if !offset.is_finite() || offset < lo - DOMAIN_EPS || offset > hi + DOMAIN_EPS {
            return Err(Error::OutOfDomain { t: offset, lo, hi });
        }
        let mut out = qvi_displacement(&self.s01, &self.s12, self.unit_time(offset))?;
        out.anchor = self.anchor;
        Ok(out)
    }
}

/// Whether a timestamp falls inside the exposure or in the gap after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotKind {
    Intra,
    Inter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timestamp {
    /// Offset from the exposure start (`L0`), in periods.
    pub t: f64,
    /// Offset from the exposure end (`L1`), in periods.
    pub t_l1: f64,
    pub kind: SlotKind,
    /// Set when the timestamp coincides with a key-state.
    pub key_state: Option<Mark>,
}

const BOUNDARY_EPS: f64 = 1e-12;

/// `factor` evenly spaced timestamps per period, classified against the
/// exposure window `[0, t0]`.
pub fn schedule_timestamps(config: &ExposureConfig, factor: usize) -> Result<Vec<Timestamp>> {
    if factor == 0 {
        return Err(Error::invalid("upsample factor must be at least 1"));
    }
    let t0 = config.t0();
    Ok((0..factor)
        .map(|k| {
            let t = k as f64 / factor as f64;
            let kind = if t <= t0 + BOUNDARY_EPS {
                SlotKind::Intra
            } else {
                SlotKind::Inter
            };
            let key_state = if k == 0 {
                Some(Mark::L0)
            } else if (t - t0).abs() <= BOUNDARY_EPS {
                Some(Mark::L1)
            } else {
                None
            };
            Timestamp {
                t,
                t_l1: t - t0,
                kind,
                key_state,
            }
        })
        .collect())
}

/// Largest deviation between the uneven-interval model at `lambda = 1`
/// (time rescaled by `t1 = 1/2`) and the equal-interval quadratic.
pub fn degenerate_check(s01: &FlowField, s12: &FlowField) -> Result<f64> {
    check_dims(s01.dims(), s12.dims())?;
    let s23 = s12.zip_map(s01, |b, a| [2.0 * b[0] - a[0], 2.0 * b[1] - a[1]])?;
    let mut s01 = s01.clone();
    let mut s23 = s23;
    s01.anchor = Mark::L1;
    s23.anchor = Mark::L1;
    let traj = fit_trajectory(&s01, &s23, 1.0)?;
    let t1 = traj.t1();
    let mut worst = 0.0f64;
    for k in 0..=10 {
        let t = k as f64 / 10.0;
        let a = eval_displacement(&traj, t * t1)?;
        let b = qvi_displacement(&s01, s12, t)?;
        worst = worst.max(a.max_abs_diff(&b)?);
    }
    Ok(worst)
}

/// Centered running median with an odd window, shrinking at the ends.
pub fn running_median(values: &[f64], window: usize) -> Vec<f64> {
    let half = window.max(1) / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(values.len());
            let mut w: Vec<f64> = values[lo..hi].to_vec();
            w.sort_by(f64::total_cmp);
            let n = w.len();
            if n % 2 == 1 {
                w[n / 2]
            } else {
                0.5 * (w[n / 2 - 1] + w[n / 2])
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: usize = 16;
    const H: usize = 12;

    fn c(uv: [f64; 2]) -> FlowField {
        FlowField::constant(W, H, uv).tagged(Mark::L1, Mark::Unset, Mark::Unset)
    }

    #[test]
    fn lambda_from_kinematic_example() {
        let est = estimate_lambda(
            &c([6.02, 0.0]),
            &c([3.18, 0.0]),
            &c([8.82, 0.0]),
            &LambdaOptions::default(),
        )
        .unwrap();
        assert!((est.lambda - 3.0 / 7.0).abs() < 1e-12);
        assert!((est.t0 - 0.7).abs() < 1e-12);
        assert!((est.t1 - 0.3).abs() < 1e-12);
        assert_eq!(est.confidence, 1.0);
        assert_eq!(est.inlier_fraction, 1.0);
    }

    #[test]
    fn uniform_translation_gives_unit_lambda() {
        let f = c([0.5, 0.0]);
        let est = estimate_lambda(&f, &f, &f, &LambdaOptions::default()).unwrap();
        assert_eq!(est.lambda, 1.0);
    }

    #[test]
    fn static_input_is_an_error() {
        let z = c([0.0, 0.0]);
        let err = estimate_lambda(&z, &z, &z, &LambdaOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientMotion { qualified: 0, .. }));
    }

    #[test]
    fn reversed_s12_fails_direction_gate() {
        let err = estimate_lambda(
            &c([6.0, 0.0]),
            &c([-3.0, 0.0]),
            &c([8.0, 0.0]),
            &LambdaOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InsufficientMotion { .. }));
    }

    #[test]
    fn too_few_pixels() {
        let f = FlowField::constant(5, 5, [2.0, 0.0]).tagged(Mark::L1, Mark::Unset, Mark::Unset);
        assert!(estimate_lambda(&f, &f, &f, &LambdaOptions::default()).is_err());
        let opts = LambdaOptions {
            min_pixels: 25,
            ..Default::default()
        };
        assert!(estimate_lambda(&f, &f, &f, &opts).is_ok());
    }

    #[test]
    fn ratio_map_marks_gated_pixels() {
        let mut s12 = c([3.18, 0.0]);
        s12.set(0, 0, [0.0, 3.0]);
        let opts = LambdaOptions {
            keep_ratio_map: true,
            ..Default::default()
        };
        let est = estimate_lambda(&c([6.02, 0.0]), &s12, &c([8.82, 0.0]), &opts).unwrap();
        let map = est.per_pixel_ratio.unwrap();
        assert_eq!(map.data[0], None);
        assert!(map.data[1].is_some());
        assert!((est.inlier_fraction - (W * H - 1) as f64 / (W * H) as f64).abs() < 1e-15);
    }

    #[test]
    fn weighted_median_basics() {
        let mut s = vec![(3.0, 1.0), (1.0, 1.0), (2.0, 1.0)];
        assert_eq!(weighted_median(&mut s), Some(2.0));
        let mut heavy = vec![(1.0, 1.0), (10.0, 5.0), (2.0, 1.0)];
        assert_eq!(weighted_median(&mut heavy), Some(10.0));
        assert_eq!(weighted_median(&mut []), None);
    }

    #[test]
    fn fit_inverts_kinematics() {
        let traj = fit_trajectory(&c([6.02, 0.0]), &c([8.82, 0.0]), 3.0 / 7.0).unwrap();
        let a = traj.accel.get(3, 3);
        let v = traj.v1.get(3, 3);
        assert!((a[0] - 4.0).abs() < 1e-12 && a[1] == 0.0);
        assert!((v[0] - 10.0).abs() < 1e-12 && v[1] == 0.0);

        let mid = eval_displacement(&traj, 0.15).unwrap();
        assert!((mid.get(0, 0)[0] - 1.545).abs() < 1e-12);
        let end = eval_displacement(&traj, 0.3).unwrap();
        assert!((end.get(0, 0)[0] - 3.18).abs() < 1e-12);
        let zero = eval_displacement(&traj, 0.0).unwrap();
        assert!(zero.vectors().all(|v| v == [0.0, 0.0]));
    }

    #[test]
    fn equal_displacements_mean_no_acceleration() {
        let lambda = 0.37;
        let traj = fit_trajectory(&c([2.5, -1.0]), &c([2.5, -1.0]), lambda).unwrap();
        assert_eq!(traj.accel.get(1, 1), [0.0, 0.0]);
        let v = traj.v1.get(1, 1);
        assert!((v[0] - (lambda + 1.0) * 2.5).abs() < 1e-12);
        assert!((v[1] + (lambda + 1.0)).abs() < 1e-12);

        let z = fit_trajectory(&c([0.0; 2]), &c([0.0; 2]), 2.0).unwrap();
        assert!(z.v1.vectors().chain(z.accel.vectors()).all(|v| v == [0.0, 0.0]));
    }

    #[test]
    fn fit_rejects_bad_lambda() {
        assert!(fit_trajectory(&c([1.0, 0.0]), &c([1.0, 0.0]), 0.0).is_err());
        assert!(fit_trajectory(&c([1.0, 0.0]), &c([1.0, 0.0]), -1.0).is_err());
        assert!(fit_trajectory(&c([1.0, 0.0]), &c([1.0, 0.0]), f64::NAN).is_err());
    }

    #[test]
    fn evaluation_domain_is_enforced() {
        let traj = fit_trajectory(&c([6.02, 0.0]), &c([8.82, 0.0]), 3.0 / 7.0).unwrap();
        assert!(eval_displacement(&traj, -0.7).is_ok());
        assert!(eval_displacement(&traj, 1.0).is_ok());
        assert!(matches!(
            eval_displacement(&traj, -0.71),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(eval_displacement(&traj, 1.01).is_err());
    }

    #[test]
    fn qvi_endpoints() {
        let s01 = c([2.0, 0.0]);
        let s12 = c([3.0, 0.0]);
        assert_eq!(qvi_displacement(&s01, &s12, 1.0).unwrap().get(0, 0), [3.0, 0.0]);
        assert_eq!(qvi_displacement(&s01, &s12, 0.0).unwrap().get(0, 0), [0.0, 0.0]);
        assert_eq!(qvi_displacement(&s01, &s12, -1.0).unwrap().get(0, 0), [-2.0, 0.0]);
        let lin = qvi_displacement(&s12, &s12, 0.4).unwrap();
        assert!((lin.get(0, 0)[0] - 1.2).abs() < 1e-15);
    }

    #[test]
    fn qvi_trajectory_maps_each_interval_to_unit_time() {
        let q = QviTrajectory::new(c([2.0, 0.0]), c([3.0, 0.0]), 0.7, 0.3).unwrap();
        assert_eq!(q.displacement(0.3).unwrap().get(0, 0), [3.0, 0.0]);
        assert_eq!(q.displacement(-0.7).unwrap().get(0, 0), [-2.0, 0.0]);
        let half = q.displacement(0.15).unwrap().get(0, 0);
        let expect = qvi_displacement(&c([2.0, 0.0]), &c([3.0, 0.0]), 0.5).unwrap().get(0, 0);
        assert!((half[0] - expect[0]).abs() < 1e-12);
    }

    #[test]
    fn schedules() {
        let six_four = ExposureConfig::from_pattern(6, 4).unwrap();
        let s = schedule_timestamps(&six_four, 10).unwrap();
        let intra: Vec<f64> = s.iter().filter(|t| t.kind == SlotKind::Intra).map(|t| t.t).collect();
        assert_eq!(intra.len(), 7);
        assert_eq!(s.len() - intra.len(), 3);
        assert!((intra[6] - 0.6).abs() < 1e-15);
        assert_eq!(s[6].key_state, Some(Mark::L1));
        assert!((s[7].t_l1 - 0.1).abs() < 1e-12);

        let unit = ExposureConfig::from_lambda(1.0).unwrap();
        let s = schedule_timestamps(&unit, 2).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(|t| t.kind == SlotKind::Intra));
        assert_eq!(s[1].t, 0.5);

        let nine_one = ExposureConfig::from_pattern(9, 1).unwrap();
        let s = schedule_timestamps(&nine_one, 10).unwrap();
        assert!(s.iter().all(|t| t.kind == SlotKind::Intra));

        assert!(schedule_timestamps(&unit, 0).is_err());
    }

    #[test]
    fn degenerate_check_small() {
        let d = degenerate_check(&c([2.0, 0.0]), &c([3.0, 0.0])).unwrap();
        assert!(d <= 1e-6, "{d}");
        assert_eq!(degenerate_check(&c([0.0; 2]), &c([0.0; 2])).unwrap(), 0.0);
    }

    #[test]
    fn running_median_smooths_outlier() {
        let v = [0.4, 0.4, 5.0, 0.4, 0.4];
        assert_eq!(running_median(&v, 3), vec![0.4, 0.4, 0.4, 0.4, 0.4]);
        assert_eq!(running_median(&v, 1), v.to_vec());
    }
}
