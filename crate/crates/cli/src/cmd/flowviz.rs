use vfi_core::flow::{flow_to_color, read_flo};
use vfi_core::frames::save_frame;

use crate::args::FlowvizArgs;
use crate::config::Settings;
use crate::error::{CliError, Result};

pub fn run(args: &FlowvizArgs, cfg: &Settings) -> Result<()> {
    let max_mag = args.max_mag.or(cfg.f64("flowviz.max_mag")?);
    if max_mag.is_some_and(|m| !(m > 0.0 && m.is_finite())) {
        return Err(CliError::usage("--max-mag must be positive"));
    }
    let field = read_flo(&args.input)?;
    save_frame(&flow_to_color(&field, max_mag), &args.out)?;
    Ok(())
}
