use serde::Serialize;
use vfi_core::flow::{compose_s23, displacements_from_flows, read_flo, write_flo};
use vfi_core::frames::save_frame;
use vfi_core::refine::{joint_estimate, refine_s23};
use vfi_core::simulator::scene_quad_flows;
use vfi_core::trajectory::estimate_lambda;
use vfi_core::{FlowField, LambdaEstimate, Mark};

use super::load_scene;
use crate::args::EstimateArgs;
use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::layout::exposure;
use crate::report::{self, SCHEMA};

#[derive(Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Override,
    Single,
    Joint,
}

#[derive(Debug, Serialize)]
struct EstimateReport<'a> {
    schema: u32,
    method: Method,
    #[serde(flatten)]
    estimate: &'a LambdaEstimate,
}

/// `(f10, f12, f13)` anchored on `L1`.
fn forward_flows(args: &EstimateArgs, cfg: &Settings) -> Result<[FlowField; 3]> {
    if let Some(paths) = &args.flows {
        let marks = [Mark::L0, Mark::L2, Mark::L3];
        let mut out = Vec::with_capacity(3);
        for (p, to) in paths.iter().zip(marks) {
            out.push(read_flo(p)?.tagged(Mark::L1, Mark::L1, to));
        }
        return Ok(out.try_into().expect("three flows"));
    }
    let Some(scene) = &args.analytic else {
        return Err(CliError::usage("give either --flows F10 F12 F13 or --analytic SCENE"));
    };
    let t0 = exposure(args.timing.t0, args.timing.true_lambda)?
        .or(cfg.f64("scene.t0")?)
        .ok_or_else(|| CliError::usage("--analytic needs --t0 or --true-lambda"))?;
    let f = scene_quad_flows(&load_scene(scene)?, args.quad, t0)?.forward;
    Ok([f.to_prev, f.to_next, f.to_next2])
}

pub fn run(args: &EstimateArgs, cfg: &Settings) -> Result<()> {
    let [f10, f12, f13] = forward_flows(args, cfg)?;
    let (s01, s12) = displacements_from_flows(&f10, &f12)?;
    let s23 = compose_s23(&f13, &f12)?;

    let (method, estimate) = match (args.ratio.lambda, args.ratio.iters) {
        (Some(l), _) => (Method::Override, LambdaEstimate::fixed(l)?),
        (None, Some(iters)) if iters > 0 => {
            let opts = cfg.joint_options(Some(iters))?;
            (Method::Joint, joint_estimate(&f10, &f12, &f13, &opts)?.estimate)
        }
        _ => (Method::Single, estimate_lambda(&s01, &s12, &s23, &cfg.lambda_options()?)?),
    };

    if args.refined.is_some() || args.confidence.is_some() {
        let (refined, confidence) = refine_s23(&f10, &f12, &s23, estimate.lambda, &cfg.refine_options()?)?;
        if let Some(p) = &args.refined {
            write_flo(&refined, p)?;
        }
        if let Some(p) = &args.confidence {
            save_frame(&confidence.to_frame(), p)?;
        }
    }

    let report = EstimateReport {
        schema: SCHEMA,
        method,
        estimate: &estimate,
    };
    report::emit(&report, args.report.as_deref())
}
