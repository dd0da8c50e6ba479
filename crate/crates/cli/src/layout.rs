//! On-disk naming shared by the subcommands.
//!
//! Flows for quad `k` live next to each other as `%06d_<name>.flo`. The
//! forward triple starts on `L1` (`f10`, `f12`, `f13`), the backward triple
//! on `L2` (`f23`, `f21`, `f20`).

use std::path::{Path, PathBuf};

use vfi_core::flow::{read_flo, write_flo};
use vfi_core::frames::ExposureConfig;
use vfi_core::synthesis::{FlowTriple, QuadFlows};
use vfi_core::trajectory::{schedule_timestamps, SlotKind};
use vfi_core::{Mark, Result};

use crate::error::CliError;

const NAMES: [(&str, Mark, Mark); 6] = [
    ("f10", Mark::L1, Mark::L0),
    ("f12", Mark::L1, Mark::L2),
    ("f13", Mark::L1, Mark::L3),
    ("f23", Mark::L2, Mark::L3),
    ("f21", Mark::L2, Mark::L1),
    ("f20", Mark::L2, Mark::L0),
];

pub fn flow_path(dir: &Path, quad: usize, name: &str) -> PathBuf {
    dir.join(format!("{quad:06}_{name}.flo"))
}

pub fn read_quad_flows(dir: &Path, quad: usize) -> Result<QuadFlows> {
    let load = |i: usize| -> Result<_> {
        let (name, anchor, to) = NAMES[i];
        Ok(read_flo(flow_path(dir, quad, name))?.tagged(anchor, anchor, to))
    };
    Ok(QuadFlows {
        forward: FlowTriple {
            to_prev: load(0)?,
            to_next: load(1)?,
            to_next2: load(2)?,
        },
        backward: FlowTriple {
            to_prev: load(3)?,
            to_next: load(4)?,
            to_next2: load(5)?,
        },
    })
}

pub fn write_quad_flows(dir: &Path, quad: usize, flows: &QuadFlows) -> Result<()> {
    let fields = [
        &flows.forward.to_prev,
        &flows.forward.to_next,
        &flows.forward.to_next2,
        &flows.backward.to_prev,
        &flows.backward.to_next,
        &flows.backward.to_next2,
    ];
    for ((name, _, _), field) in NAMES.iter().zip(fields) {
        write_flo(field, flow_path(dir, quad, name))?;
    }
    Ok(())
}

/// Exposure fraction from `--t0` or `--true-lambda`.
pub fn exposure(t0: Option<f64>, lambda: Option<f64>) -> std::result::Result<Option<f64>, CliError> {
    let cfg = match (t0, lambda) {
        (Some(t0), _) => ExposureConfig::new(t0, 1.0 - t0),
        (None, Some(l)) => ExposureConfig::from_lambda(l),
        (None, None) => return Ok(None),
    };
    cfg.map(|c| Some(c.t0())).map_err(|e| CliError::usage(e.to_string()))
}

/// Quads whose four key-states fit inside a scene window starting at 0.
pub fn quads_in_window(window: (f64, f64), t0: f64) -> usize {
    let span = window.1 - t0;
    if window.0 > 0.0 || span < 1.0 {
        return 0;
    }
    (span + 1e-9).floor() as usize
}

/// One ground-truth timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthSlot {
    pub period: usize,
    pub time: f64,
    pub kind: SlotKind,
    pub key_state: bool,
}

/// The timestamps the renderer emits for `periods` quads: every slot of
/// each period, then the exposure of the last input frame.
pub fn truth_schedule(t0: f64, periods: usize, factor: usize) -> Result<Vec<TruthSlot>> {
    let cfg = ExposureConfig::new(t0, 1.0 - t0)?;
    let stamps = schedule_timestamps(&cfg, factor)?;
    let mut out = Vec::new();
    for period in 0..=periods {
        for ts in &stamps {
            if period == periods && ts.kind != SlotKind::Intra {
                continue;
            }
            out.push(TruthSlot {
                period,
                time: period as f64 + ts.t,
                kind: ts.kind,
                key_state: ts.key_state.is_some(),
            });
        }
    }
    Ok(out)
}
