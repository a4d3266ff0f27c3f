use std::path::{Path, PathBuf};

use cavity_dj::dynamics::DipoleVariant;
use cavity_dj::lab::linspace;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig3a,
    Fig3b,
    Fig4,
}

/// Every setting a subcommand may read. Command-line flags take precedence over
/// values loaded from `--config`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub ratios: Option<Vec<f64>>,
    pub omega0_khz: Option<f64>,
    pub omega1_khz: Option<f64>,
    pub eta: Option<f64>,
    pub kappa_ratio: Option<f64>,
    pub delta_ratio: Option<f64>,
    pub dipole_variant: Option<DipoleVariant>,
    pub timing_deviation: Option<f64>,
    pub photon_cutoff: Option<usize>,
    pub function: Option<String>,
    pub label: Option<String>,
    pub threshold: Option<f64>,
    pub ideal: Option<bool>,
    pub limit: Option<u64>,
    pub preset: Option<Preset>,
    pub kappa_grid: Option<Vec<f64>>,
    pub deviation_grid: Option<Vec<f64>>,
    pub eta_grid: Option<Vec<f64>>,
    pub delta_grid: Option<Vec<f64>>,
    pub kappa_set: Option<Vec<f64>>,
    pub variants: Option<Vec<DipoleVariant>>,
    pub jobs: Option<usize>,
    pub lifetime_ms: Option<f64>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub claimed_max_n: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($field:ident),* $(,)?) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("config: cannot read {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(
            self,
            base,
            n,
            ratios,
            omega0_khz,
            omega1_khz,
            eta,
            kappa_ratio,
            delta_ratio,
            dipole_variant,
            timing_deviation,
            photon_cutoff,
            function,
            label,
            threshold,
            ideal,
            limit,
            preset,
            kappa_grid,
            deviation_grid,
            eta_grid,
            delta_grid,
            kappa_set,
            variants,
            jobs,
            lifetime_ms,
            n_min,
            n_max,
            claimed_max_n,
            format,
            out,
        )
    }
}

/// `a,b,c` lists or `start:end:count` ranges.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let number = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, end, count] => {
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| format!("`{count}` is not a point count"))?;
            Ok(linspace(number(start)?, number(end)?, count))
        }
        [_] => s.split(',').map(number).collect(),
        _ => Err(format!("`{s}`: expected a,b,c or start:end:count")),
    }
}
