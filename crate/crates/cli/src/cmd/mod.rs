pub mod estimate;
pub mod eval;
pub mod flowviz;
pub mod interp;
pub mod scene;
pub mod synth;

use std::path::Path;

use vfi_core::simulator::SceneSpec;

use crate::error::{CliError, Result};

/// Read a scene description. Unreadable files are i/o errors; malformed
/// or invalid scenes are usage errors.
pub fn load_scene(path: &Path) -> Result<SceneSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let spec: SceneSpec =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}
