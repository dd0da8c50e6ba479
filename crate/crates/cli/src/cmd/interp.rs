use std::cell::RefCell;
use std::path::{Path, PathBuf};

use serde::Serialize;
use vfi_core::frames::{count_key_states, import_key_states, save_frame};
use vfi_core::simulator::{scene_quad, scene_quad_flows, SceneSpec};
use vfi_core::synthesis::{
    interpolate_sequence, output_file_name, prepare_quad_with, resolve_lambda, FrameRecord, OutputManifest,
    PipelineOptions, QuadFlows,
};
use vfi_core::trajectory::running_median;
use vfi_core::{KeyStateQuad, LambdaEstimate};

use super::{create_dir, load_scene};
use crate::args::InterpArgs;
use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::layout::{exposure, quads_in_window, read_quad_flows};
use crate::report::{self, SCHEMA};

enum Source {
    Disk { keys: PathBuf, flows: PathBuf },
    Analytic { spec: SceneSpec, t0: f64 },
}

impl Source {
    fn flows(&self, k: usize) -> vfi_core::Result<QuadFlows> {
        match self {
            Source::Disk { flows, .. } => read_quad_flows(flows, k),
            Source::Analytic { spec, t0 } => scene_quad_flows(spec, k, *t0),
        }
    }

    fn quad(&self, k: usize) -> vfi_core::Result<(KeyStateQuad, QuadFlows)> {
        match self {
            Source::Disk { keys, .. } => Ok((import_key_states(keys, k)?, self.flows(k)?)),
            Source::Analytic { spec, t0 } => scene_quad(spec, k, *t0),
        }
    }
}

fn open_source(args: &InterpArgs, cfg: &Settings) -> Result<(Source, usize)> {
    if let Some(keys) = &args.keys {
        let flows = args.flows.clone().unwrap_or_else(|| match keys.parent() {
            Some(parent) => parent.join("flows"),
            None => PathBuf::from("flows"),
        });
        if !keys.is_dir() {
            return Err(CliError::io(keys, std::io::ErrorKind::NotFound.into()));
        }
        let states = count_key_states(keys);
        if states < 2 {
            return Err(CliError::usage(format!(
                "{} needs at least two key-state pairs, found {states}",
                keys.display()
            )));
        }
        let source = Source::Disk {
            keys: keys.clone(),
            flows,
        };
        return Ok((source, states - 1));
    }
    let path = args.analytic.as_ref().expect("clap requires --keys or --analytic");
    let spec = load_scene(path)?;
    let t0 = exposure(args.timing.t0, args.timing.true_lambda)?
        .or(cfg.f64("scene.t0")?)
        .ok_or_else(|| CliError::usage("--analytic needs --t0 or --true-lambda"))?;
    let fit = quads_in_window(spec.window, t0);
    let periods = args.periods.unwrap_or(fit);
    if periods == 0 || periods > fit {
        return Err(CliError::usage(format!("scene window holds {fit} quads, {periods} requested")));
    }
    Ok((Source::Analytic { spec, t0 }, periods))
}

/// Per-quad ratios replaced by their running median.
fn smoothed_estimates(source: &Source, count: usize, window: usize, opts: &PipelineOptions) -> Result<Vec<LambdaEstimate>> {
    let raw = (0..count)
        .map(|k| source.flows(k).and_then(|f| resolve_lambda(&f, opts)).map_err(|e| e.in_quad(k)))
        .collect::<vfi_core::Result<Vec<_>>>()?;
    let lambdas: Vec<f64> = raw.iter().map(|e| e.lambda).collect();
    Ok(raw
        .into_iter()
        .zip(running_median(&lambdas, window))
        .map(|(e, lambda)| LambdaEstimate {
            lambda,
            t0: 1.0 / (1.0 + lambda),
            t1: lambda / (1.0 + lambda),
            ..e
        })
        .collect())
}

#[derive(Debug, Serialize)]
struct InterpSummary {
    schema: u32,
    frames: usize,
    lambdas: Vec<f64>,
}

fn render(args: &InterpArgs, cfg: &Settings, written: &mut Vec<PathBuf>) -> Result<()> {
    let factor = args.factor.or(cfg.usize("interp.factor")?).unwrap_or(10);
    let smooth = args.smooth.or(cfg.usize("interp.smooth")?);
    if smooth.is_some_and(|w| w % 2 == 0) {
        return Err(CliError::usage("--smooth needs an odd window"));
    }
    let opts = cfg.pipeline_options(args.ratio.lambda, args.ratio.iters, args.no_refine, args.qvi)?;
    let (source, count) = open_source(args, cfg)?;
    let fixed = match smooth {
        Some(w) if w > 1 && opts.lambda_override.is_none() => Some(smoothed_estimates(&source, count, w, &opts)?),
        _ => None,
    };

    let lambdas = RefCell::new(Vec::with_capacity(count));
    let quads = (0..count).map(|k| {
        let (quad, flows) = source.quad(k)?;
        let estimate = match &fixed {
            Some(all) => all[k].clone(),
            None => resolve_lambda(&flows, &opts)?,
        };
        lambdas.borrow_mut().push(estimate.lambda);
        prepare_quad_with(quad, &flows, estimate, &opts)
    });

    let mut records = Vec::new();
    for (i, rendered) in interpolate_sequence(quads, factor)?.enumerate() {
        let r = rendered?;
        let file = output_file_name(i);
        let path = args.out.join(&file);
        written.push(path.clone());
        save_frame(&r.frame, &path)?;
        records.push(FrameRecord {
            file,
            time: r.time,
            period: r.period,
            kind: r.kind,
            key_state: r.key_state,
        });
    }
    let lambdas = lambdas.into_inner();
    let manifest = OutputManifest {
        schema: SCHEMA,
        factor,
        lambdas: lambdas.clone(),
        frames: records,
    };
    let path = args.out.join("manifest.json");
    written.push(path.clone());
    report::write_json(&path, &manifest)?;
    report::emit(
        &InterpSummary {
            schema: SCHEMA,
            frames: manifest.frames.len(),
            lambdas,
        },
        None,
    )
}

/// Remove what a failed run left behind, including `out` if it was new.
fn clean_up(out: &Path, existed: bool, written: &[PathBuf]) {
    if existed {
        for p in written {
            let _ = std::fs::remove_file(p);
        }
    } else {
        let _ = std::fs::remove_dir_all(out);
    }
}

pub fn run(args: &InterpArgs, cfg: &Settings) -> Result<()> {
    let existed = args.out.exists();
    let mut written = Vec::new();
    let result = create_dir(&args.out).and_then(|_| render(args, cfg, &mut written));
    if result.is_err() {
        clean_up(&args.out, existed, &written);
    }
    result
}
