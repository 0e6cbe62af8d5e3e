//! Everything a run depends on. Loaded from JSON, then overridden by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use lcc_core::regression::{LabelPlacement, Precision};
use lcc_core::simulator::{Corruption, DelayModel};

use crate::CliError;

/// Environment variable naming the default report directory.
pub const OUT_DIR_ENV: &str = "LCC_OUT_DIR";
/// Used when neither `--out` nor [`OUT_DIR_ENV`] is set.
pub const DEFAULT_OUT_DIR: &str = "lcc-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Plan,
    Encode,
    Simulate,
    Sweep,
    AuditPrivacy,
    Regress,
    Bench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Plan => "plan",
            Command::Encode => "encode",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::AuditPrivacy => "audit-privacy",
            Command::Regress => "regress",
            Command::Bench => "bench",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    Identity,
    Square,
    /// Product of `deg` equal groups.
    Monomial,
    /// Two packed square matrices, `M = 2 s^2`.
    Bilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Real,
    Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeArgs {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub a: usize,
    pub t: usize,
    pub deg: usize,
}

impl Default for SchemeArgs {
    fn default() -> Self {
        Self { n: 8, k: 2, s: 1, a: 1, t: 1, deg: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepArgs {
    pub max_n: usize,
    pub max_k: usize,
    pub max_deg: usize,
    pub trials: usize,
}

impl Default for SweepArgs {
    fn default() -> Self {
        Self { max_n: 12, max_k: 6, max_deg: 3, trials: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegressArgs {
    /// Workers.
    pub n: usize,
    /// Partitions stored per worker.
    pub r: usize,
    /// Synthetic rows and features; ignored with `data`.
    pub m: usize,
    pub d: usize,
    pub iters: usize,
    pub mode: ModeKind,
    /// Fixed-point scale `2^scale` in field mode.
    pub scale: u32,
    pub precision: Precision,
    pub labels: Option<LabelPlacement>,
    pub step: Option<f64>,
    pub momentum: f64,
    /// Workers that never return, drawn afresh each iteration.
    pub stragglers: usize,
    /// CSV, one sample per row, label last.
    pub data: Option<PathBuf>,
}

impl Default for RegressArgs {
    fn default() -> Self {
        Self {
            n: 40,
            r: 10,
            m: 400,
            d: 8,
            iters: 100,
            mode: ModeKind::Real,
            scale: 8,
            precision: Precision::Extended,
            labels: None,
            step: None,
            momentum: 0.9,
            stragglers: 0,
            data: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelayArgs {
    pub prob: f64,
    pub secs: f64,
    pub unit_cost: f64,
    pub base_latency: f64,
}

impl Default for DelayArgs {
    fn default() -> Self {
        let d = DelayModel::injected();
        Self { prob: d.slow_prob, secs: d.slow_secs, unit_cost: d.unit_cost, base_latency: d.base_latency }
    }
}

impl DelayArgs {
    pub fn model(&self) -> DelayModel {
        DelayModel { base_latency: self.base_latency, unit_cost: self.unit_cost, slow_prob: self.prob, slow_secs: self.secs }
    }
}

/// A complete, serializable description of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub scheme: SchemeArgs,
    /// Computation for `simulate`; derived from `deg` when absent.
    pub spec: Option<SpecKind>,
    /// Prime modulus; the smallest prime that fits the scheme when absent.
    pub modulus: Option<u64>,
    /// Entries per block.
    pub block_len: usize,
    pub trials: usize,
    /// `None` rotates through every corruption mode.
    pub corruption: Option<Corruption>,
    pub sweep: SweepArgs,
    pub regress: RegressArgs,
    pub runs: usize,
    pub delay: DelayArgs,
    pub seed: u64,
    /// Dataset for `encode`: one block per row, integers.
    pub input: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            scheme: SchemeArgs::default(),
            spec: None,
            modulus: None,
            block_len: 2,
            trials: 100,
            corruption: None,
            sweep: SweepArgs::default(),
            regress: RegressArgs::default(),
            runs: 100,
            delay: DelayArgs::default(),
            seed: 0,
            input: None,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// `--out`, then the environment, then [`DEFAULT_OUT_DIR`].
    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}
