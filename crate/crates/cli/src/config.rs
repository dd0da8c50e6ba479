//! Settings file: JSON with namespaced keys.
//!
//! Keys may be written flat (`"trajectory.mag_floor": 0.6`) or nested
//! (`{"trajectory": {"mag_floor": 0.6}}`). Command-line flags override the
//! file, which overrides built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;
use vfi_core::refine::{JointOptions, RefineOptions};
use vfi_core::synthesis::PipelineOptions;
use vfi_core::LambdaOptions;

use crate::error::{CliError, Result};

pub const KEYS: &[&str] = &[
    "runtime.threads",
    "trajectory.mag_floor",
    "trajectory.cos_floor",
    "trajectory.min_pixels",
    "trajectory.inlier_band",
    "refine.enabled",
    "refine.tau_px",
    "refine.mag_floor",
    "joint.max_iters",
    "joint.tol",
    "interp.factor",
    "interp.smooth",
    "interp.qvi",
    "synth.m",
    "synth.n",
    "synth.fps_in",
    "scene.seed",
    "scene.width",
    "scene.height",
    "scene.sprites",
    "scene.t0",
    "scene.periods",
    "scene.factor",
    "metrics.luma",
    "flowviz.max_mag",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, Value>,
}

fn flatten(prefix: &str, value: Value, out: &mut BTreeMap<String, Value>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other);
        }
    }
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if !value.is_object() {
            return Err("settings must be a JSON object".into());
        }
        let mut values = BTreeMap::new();
        flatten("", value, &mut values);
        if let Some(bad) = values.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(format!("unknown setting `{bad}`"));
        }
        Ok(Self { values })
    }

    fn typed<T>(&self, key: &str, kind: &str, conv: impl Fn(&Value) -> Option<T>) -> Result<Option<T>> {
        debug_assert!(KEYS.contains(&key), "unregistered key {key}");
        self.values
            .get(key)
            .map(|v| conv(v).ok_or_else(|| CliError::usage(format!("setting `{key}` must be {kind}, got {v}"))))
            .transpose()
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.typed(key, "a number", Value::as_f64)
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.typed(key, "a non-negative integer", |v| v.as_u64().map(|u| u as usize))
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.typed(key, "a non-negative integer", Value::as_u64)
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.typed(key, "a boolean", Value::as_bool)
    }

    pub fn lambda_options(&self) -> Result<LambdaOptions> {
        let d = LambdaOptions::default();
        Ok(LambdaOptions {
            mag_floor: self.f64("trajectory.mag_floor")?.unwrap_or(d.mag_floor),
            cos_floor: self.f64("trajectory.cos_floor")?.unwrap_or(d.cos_floor),
            min_pixels: self.usize("trajectory.min_pixels")?.unwrap_or(d.min_pixels),
            inlier_band: self.f64("trajectory.inlier_band")?.unwrap_or(d.inlier_band),
            ..d
        })
    }

    pub fn refine_options(&self) -> Result<RefineOptions> {
        let d = RefineOptions::default();
        Ok(RefineOptions {
            tau_px: self.f64("refine.tau_px")?.unwrap_or(d.tau_px),
            mag_floor: self.f64("refine.mag_floor")?.unwrap_or(d.mag_floor),
        })
    }

    /// Joint options with `iters` (a flag) taking precedence.
    pub fn joint_options(&self, iters: Option<usize>) -> Result<JointOptions> {
        let d = JointOptions::default();
        Ok(JointOptions {
            lambda: self.lambda_options()?,
            refine: self.refine_options()?,
            max_iters: iters.or(self.usize("joint.max_iters")?).unwrap_or(d.max_iters),
            tol: self.f64("joint.tol")?.unwrap_or(d.tol),
        })
    }

    pub fn pipeline_options(
        &self,
        lambda: Option<f64>,
        iters: Option<usize>,
        no_refine: bool,
        qvi: bool,
    ) -> Result<PipelineOptions> {
        let refine = if no_refine {
            false
        } else {
            self.bool("refine.enabled")?.unwrap_or(true)
        };
        Ok(PipelineOptions {
            joint: self.joint_options(iters)?,
            lambda_override: lambda,
            refine,
            qvi: qvi || self.bool("interp.qvi")?.unwrap_or(false),
        })
    }
}
