//! Run manifests: enough provenance to reproduce a run byte-identically
//! (same binary, same precision setting).

use breather_core::FieldMeta;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub order: usize,
    /// sparse (index, value) pairs as given on the command line
    pub a: Vec<(usize, f64)>,
    pub b: Vec<(usize, f64)>,
    pub phase: f64,
    pub precision: u32,
    pub threads: usize,
    pub grid: (f64, f64, usize, f64, f64, usize),
    /// seed used by any randomized audit in this tool version
    pub audit_seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: ConfigEcho,
    pub field: FieldMeta,
    pub artifacts: Vec<String>,
    pub wall_clock_s: f64,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: ConfigEcho,
        artifacts: Vec<PathBuf>,
        wall_clock_s: f64,
    ) -> Self {
        let mut a_tilde = vec![0.0; config.order.saturating_sub(1)];
        let mut b_tilde = vec![0.0; config.order.saturating_sub(1)];
        for (k, v) in &config.a {
            a_tilde[k - 1] = *v;
        }
        for (k, v) in &config.b {
            b_tilde[k - 1] = *v;
        }
        let field = FieldMeta {
            order: config.order,
            a_tilde,
            b_tilde,
            phase: config.phase,
            precision: config.precision,
            representation: "degenerate".into(),
        };
        RunManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            field,
            artifacts: artifacts
                .into_iter()
                .map(|p| p.display().to_string())
                .collect(),
            wall_clock_s,
        }
    }
}

/// Write PREFIX.json next to the data artifacts.
pub fn write_with_manifest(prefix: &Path, manifest: RunManifest) -> anyhow::Result<()> {
    let path = prefix.with_extension("json");
    let json = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(path, json)?;
    Ok(())
}
