//! Scores split into key-state (deblurring) and in-between (interpolation)
//! slots, following the ground-truth manifest's labels.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use vfi_core::frames::load_frame;
use vfi_core::metrics::{psnr_in, ssim_in, MetricSpace, SSIM_C1, SSIM_C2, SSIM_SIGMA, SSIM_WINDOW};
use vfi_core::synthesis::{FrameRecord, OutputManifest};
use vfi_core::trajectory::SlotKind;

use crate::args::EvalArgs;
use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::report::{self, Db, SCHEMA};

const TIME_TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
struct SsimParams {
    window: usize,
    sigma: f64,
    c1: f64,
    c2: f64,
}

#[derive(Debug, Serialize)]
struct FrameScore {
    file: String,
    time: f64,
    kind: SlotKind,
    psnr: Db,
    ssim: f64,
}

#[derive(Debug, Serialize)]
struct Section {
    count: usize,
    psnr: Option<Db>,
    ssim: Option<f64>,
    frames: Vec<FrameScore>,
}

impl Section {
    fn new(frames: Vec<FrameScore>) -> Self {
        let n = frames.len() as f64;
        let mean = |f: fn(&FrameScore) -> f64| (!frames.is_empty()).then(|| frames.iter().map(f).sum::<f64>() / n);
        Self {
            count: frames.len(),
            psnr: mean(|s| s.psnr.0).map(Db),
            ssim: mean(|s| s.ssim),
            frames,
        }
    }
}

#[derive(Debug, Serialize)]
struct EvalReport {
    schema: u32,
    space: MetricSpace,
    ssim_params: SsimParams,
    deblurring: Section,
    interpolation: Section,
}

fn load_manifest(dir: &Path) -> Result<OutputManifest> {
    let path = dir.join("manifest.json");
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn check_match(out: &[FrameRecord], gt: &[FrameRecord]) -> Result<()> {
    if out.len() != gt.len() {
        return Err(CliError::usage(format!(
            "manifest mismatch: {} output frames, {} ground-truth frames",
            out.len(),
            gt.len()
        )));
    }
    if let Some((a, b)) = out.iter().zip(gt).find(|(a, b)| (a.time - b.time).abs() > TIME_TOL) {
        return Err(CliError::usage(format!(
            "manifest mismatch: {} at t = {} against {} at t = {}",
            a.file, a.time, b.file, b.time
        )));
    }
    Ok(())
}

pub fn run(args: &EvalArgs, cfg: &Settings) -> Result<()> {
    let space = if args.luma || cfg.bool("metrics.luma")?.unwrap_or(false) {
        MetricSpace::Luma
    } else {
        MetricSpace::Rgb
    };
    let (out, gt) = (load_manifest(&args.out)?, load_manifest(&args.gt)?);
    check_match(&out.frames, &gt.frames)?;

    let scored = out
        .frames
        .par_iter()
        .zip(&gt.frames)
        .map(|(o, g)| -> Result<(bool, FrameScore)> {
            let a = load_frame(args.out.join(&o.file))?;
            let b = load_frame(args.gt.join(&g.file))?;
            let score = FrameScore {
                file: o.file.clone(),
                time: g.time,
                kind: g.kind,
                psnr: Db(psnr_in(&a, &b, space)?),
                ssim: ssim_in(&a, &b, space)?,
            };
            Ok((g.key_state, score))
        })
        .collect::<Result<Vec<_>>>()?;
    let (keys, rest): (Vec<_>, Vec<_>) = scored.into_iter().partition(|(k, _)| *k);
    let strip = |v: Vec<(bool, FrameScore)>| v.into_iter().map(|(_, s)| s).collect();

    let report = EvalReport {
        schema: SCHEMA,
        space,
        ssim_params: SsimParams {
            window: SSIM_WINDOW,
            sigma: SSIM_SIGMA,
            c1: SSIM_C1,
            c2: SSIM_C2,
        },
        deblurring: Section::new(strip(keys)),
        interpolation: Section::new(strip(rest)),
    };
    report::emit(&report, args.report.as_deref())
}
