//! Analytic scene bundle: the scene itself, instantaneous key-states, exact
//! flows for every quad and ground-truth frames on the output schedule.

use rayon::prelude::*;
use serde::Serialize;
use vfi_core::frames::{export_key_states, save_frame};
use vfi_core::simulator::{gen_scene_frame, scene_quad_flows, SceneSpec};
use vfi_core::synthesis::{output_file_name, FrameRecord, OutputManifest};

use super::{create_dir, load_scene};
use crate::args::SceneArgs;
use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::layout::{exposure, quads_in_window, truth_schedule, write_quad_flows};
use crate::report::{self, SCHEMA};

#[derive(Debug, Serialize)]
struct SceneSummary {
    schema: u32,
    t0: f64,
    t1: f64,
    lambda: f64,
    periods: usize,
    factor: usize,
    truth_frames: usize,
}

pub fn run(args: &SceneArgs, cfg: &Settings) -> Result<()> {
    let t0 = exposure(args.timing.t0, args.timing.true_lambda)?
        .or(cfg.f64("scene.t0")?)
        .unwrap_or(0.7);
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(CliError::usage(format!("exposure fraction must lie in (0, 1), got {t0}")));
    }
    let factor = args.factor.or(cfg.usize("scene.factor")?).unwrap_or(10);
    if factor == 0 {
        return Err(CliError::usage("--factor must be at least 1"));
    }
    let periods = args.periods.or(cfg.usize("scene.periods")?);
    let (spec, periods) = match &args.spec {
        Some(path) => {
            let spec = load_scene(path)?;
            let fit = quads_in_window(spec.window, t0);
            let periods = periods.unwrap_or(fit);
            if periods > fit {
                return Err(CliError::usage(format!("scene window holds {fit} quads, {periods} requested")));
            }
            (spec, periods)
        }
        None => {
            let periods = periods.unwrap_or(2);
            let seed = args.seed.or(cfg.u64("scene.seed")?).unwrap_or(0);
            let width = args.width.or(cfg.usize("scene.width")?).unwrap_or(128);
            let height = args.height.or(cfg.usize("scene.height")?).unwrap_or(128);
            let sprites = args.sprites.or(cfg.usize("scene.sprites")?).unwrap_or(3);
            let window = (0.0, periods as f64 + t0);
            (SceneSpec::random(seed, width, height, sprites, window)?, periods)
        }
    };
    if periods == 0 {
        return Err(CliError::usage("a scene needs at least one quad"));
    }

    let (keys, flows, truth) = (args.out.join("keys"), args.out.join("flows"), args.out.join("truth"));
    for d in [&keys, &flows, &truth] {
        create_dir(d)?;
    }
    report::write_json(&args.out.join("scene.json"), &spec)?;

    (0..=periods).into_par_iter().try_for_each(|k| -> Result<()> {
        let start = gen_scene_frame(&spec, k as f64)?;
        let end = gen_scene_frame(&spec, k as f64 + t0)?;
        export_key_states(&keys, k, &start, &end)?;
        if k < periods {
            write_quad_flows(&flows, k, &scene_quad_flows(&spec, k, t0)?)?;
        }
        Ok(())
    })?;

    let slots = truth_schedule(t0, periods, factor)?;
    slots.par_iter().enumerate().try_for_each(|(i, s)| -> Result<()> {
        let frame = gen_scene_frame(&spec, s.time)?;
        Ok(save_frame(&frame, truth.join(output_file_name(i)))?)
    })?;
    let lambda = (1.0 - t0) / t0;
    let manifest = OutputManifest {
        schema: SCHEMA,
        factor,
        lambdas: vec![lambda; periods],
        frames: slots
            .iter()
            .enumerate()
            .map(|(i, s)| FrameRecord {
                file: output_file_name(i),
                time: s.time,
                period: s.period,
                kind: s.kind,
                key_state: s.key_state,
            })
            .collect(),
    };
    report::write_json(&truth.join("manifest.json"), &manifest)?;

    let summary = SceneSummary {
        schema: SCHEMA,
        t0,
        t1: 1.0 - t0,
        lambda,
        periods,
        factor,
        truth_frames: slots.len(),
    };
    report::write_json(&args.out.join("timing.json"), &summary)?;
    report::emit(&summary, None)
}
