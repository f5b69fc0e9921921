//! Flat TOML config file: any `SystemConfig` field plus the experiment keys.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{parse_methods, ExperimentSpec};
use crate::config::{Rounding, SystemConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub num_antennas: Option<usize>,
    pub num_ul: Option<usize>,
    pub num_dl: Option<usize>,
    pub cell_radius: Option<f64>,
    pub min_distance: Option<f64>,
    pub carrier_freq: Option<f64>,
    pub bandwidth: Option<f64>,
    pub noise_psd: Option<f64>,
    pub noise_figure_bs: Option<f64>,
    pub noise_figure_ue: Option<f64>,
    pub tx_distortion_db: Option<f64>,
    pub rx_distortion_db: Option<f64>,
    pub si_cancellation_db: Option<f64>,
    pub rician_k: Option<f64>,
    pub p_dl_max: Option<f64>,
    pub p_ul_max: Option<f64>,
    pub epsilon: Option<f64>,
    pub alpha: Option<f64>,
    pub rho: Option<f64>,
    pub num_restarts: Option<usize>,
    pub max_iters: Option<usize>,
    pub rounding: Option<Rounding>,
    pub exh_exclude_degenerate: Option<bool>,
    pub seed: Option<u64>,
    // experiment keys
    pub methods: Option<String>,
    pub monte_carlo_iters: Option<usize>,
    pub si_levels_db: Option<Vec<f64>>,
    pub antenna_counts: Option<Vec<usize>>,
    pub output_path: Option<PathBuf>,
}

macro_rules! overlay {
    ($src:expr, $dst:expr, $($field:ident),* $(,)?) => {
        $( if let Some(v) = $src.$field.clone() { $dst.$field = v; } )*
    };
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn apply_system(&self, cfg: &mut SystemConfig) {
        overlay!(
            self, cfg, num_antennas, num_ul, num_dl, cell_radius, min_distance, carrier_freq, bandwidth,
            noise_psd, noise_figure_bs, noise_figure_ue, tx_distortion_db, rx_distortion_db,
            si_cancellation_db, rician_k, p_dl_max, p_ul_max, epsilon, alpha, rho, num_restarts,
            max_iters, rounding, exh_exclude_degenerate, seed,
        );
    }

    pub fn apply_experiment(&self, spec: &mut ExperimentSpec) -> Result<()> {
        if let Some(m) = &self.methods {
            spec.methods = parse_methods(m)?;
        }
        overlay!(self, spec, monte_carlo_iters, si_levels_db, antenna_counts, seed);
        if let Some(p) = &self.output_path {
            spec.output_path = Some(p.clone());
        }
        Ok(())
    }
}

/// Reads and parses a config file. A missing file is an I/O error.
pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    ConfigFile::parse(&std::fs::read_to_string(path)?)
}
