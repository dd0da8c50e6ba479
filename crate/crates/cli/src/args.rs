use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Frame interpolation for videos with unknown exposure timing.
#[derive(Debug, Parser)]
#[command(name = "vfi", version)]
pub struct Cli {
    /// JSON file with namespaced settings, e.g. {"trajectory": {"mag_floor": 0.5}}.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads. Output does not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Average sharp frames into a blurry dataset with key-state ground truth.
    Synth(SynthArgs),
    /// Generate an analytic scene with key-states, exact flows and ground truth.
    Scene(SceneArgs),
    /// Estimate the exposure ratio of one frame quad.
    Estimate(EstimateArgs),
    /// Interpolate a sequence of key-state quads.
    Interp(InterpArgs),
    /// Score interpolated frames against ground truth.
    Eval(EvalArgs),
    /// Render a .flo file with the colour wheel.
    Flowviz(FlowvizArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Directory of sharp PNG frames, taken in file-name order.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Frames averaged per exposure.
    #[arg(long)]
    pub m: Option<usize>,
    /// Frames skipped after each exposure.
    #[arg(long)]
    pub n: Option<usize>,
    /// Frame rate of the sharp input.
    #[arg(long)]
    pub fps_in: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Use this scene instead of generating one.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long)]
    pub sprites: Option<usize>,
    #[command(flatten)]
    pub timing: TimingArgs,
    /// Number of frame quads.
    #[arg(long)]
    pub periods: Option<usize>,
    /// Ground-truth frames per period.
    #[arg(long)]
    pub factor: Option<usize>,
}

/// Exposure timing of an analytic scene.
#[derive(Debug, Args)]
pub struct TimingArgs {
    /// Exposure fraction of a period.
    #[arg(long, conflicts_with = "true_lambda")]
    pub t0: Option<f64>,
    /// Exposure given as the ratio t1/t0.
    #[arg(long = "true-lambda")]
    pub true_lambda: Option<f64>,
}

/// Ratio estimation controls shared by `estimate` and `interp`.
#[derive(Debug, Args)]
pub struct RatioArgs {
    /// Use this ratio instead of estimating it.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Iterations of the joint ratio and flow refinement.
    #[arg(long)]
    pub iters: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Flows from L1 to L0, L2 and L3.
    #[arg(long, num_args = 3, value_names = ["F10", "F12", "F13"], conflicts_with = "analytic")]
    pub flows: Option<Vec<PathBuf>>,
    /// Scene JSON; exact flows are generated for the chosen quad.
    #[arg(long)]
    pub analytic: Option<PathBuf>,
    #[command(flatten)]
    pub timing: TimingArgs,
    /// Quad index for --analytic.
    #[arg(long, default_value_t = 0)]
    pub quad: usize,
    #[command(flatten)]
    pub ratio: RatioArgs,
    /// Write the refined L2-to-L3 displacement here.
    #[arg(long)]
    pub refined: Option<PathBuf>,
    /// Write the refinement confidence here as a grayscale PNG.
    #[arg(long)]
    pub confidence: Option<PathBuf>,
    /// Also write the report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InterpArgs {
    /// Directory of key-states `%06d_s.png` / `%06d_e.png`.
    #[arg(long, conflicts_with = "analytic", required_unless_present = "analytic")]
    pub keys: Option<PathBuf>,
    /// Directory of flows `%06d_f10.flo` ...; defaults to `<keys>/../flows`.
    #[arg(long, requires = "keys")]
    pub flows: Option<PathBuf>,
    /// Scene JSON rendered with exact flows.
    #[arg(long)]
    pub analytic: Option<PathBuf>,
    #[command(flatten)]
    pub timing: TimingArgs,
    /// Number of quads for --analytic; defaults to all that fit the scene window.
    #[arg(long)]
    pub periods: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    /// Output frames per input period.
    #[arg(long)]
    pub factor: Option<usize>,
    #[command(flatten)]
    pub ratio: RatioArgs,
    /// Skip flow refinement and use the single-pass ratio.
    #[arg(long)]
    pub no_refine: bool,
    /// Equal-interval motion model.
    #[arg(long)]
    pub qvi: bool,
    /// Smooth per-quad ratios with a running median of this odd width.
    #[arg(long)]
    pub smooth: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Interpolation output directory with `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth directory with a matching `manifest.json`.
    #[arg(long)]
    pub gt: PathBuf,
    /// Score luma instead of RGB.
    #[arg(long)]
    pub luma: bool,
    /// Also write the report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlowvizArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Magnitude mapped to full saturation; defaults to the field maximum.
    #[arg(long)]
    pub max_mag: Option<f64>,
}
