use std::path::{Path, PathBuf};

use vfi_core::frames::load_frame;
use vfi_core::simulator::write_blur_dataset;

use crate::args::SynthArgs;
use crate::config::Settings;
use crate::error::{CliError, Result};
use crate::report;

fn png_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

pub fn run(args: &SynthArgs, cfg: &Settings) -> Result<()> {
    let m = args.m.or(cfg.usize("synth.m")?).ok_or_else(|| CliError::usage("--m is required"))?;
    let n = args.n.or(cfg.usize("synth.n")?).ok_or_else(|| CliError::usage("--n is required"))?;
    let fps_in = args.fps_in.or(cfg.f64("synth.fps_in")?).unwrap_or(240.0);
    if m == 0 {
        return Err(CliError::usage("--m must be at least 1"));
    }
    if !(fps_in > 0.0 && fps_in.is_finite()) {
        return Err(CliError::usage("--fps-in must be positive"));
    }
    let inputs = png_files(&args.input)?;
    if inputs.len() < m {
        return Err(CliError::usage(format!(
            "{} holds {} frames, fewer than m = {m}",
            args.input.display(),
            inputs.len()
        )));
    }
    let frames = inputs.iter().map(load_frame);
    let manifest = write_blur_dataset(frames, m, n, fps_in, &args.out)?;
    report::emit(&manifest, None)
}
