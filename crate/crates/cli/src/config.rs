//! Flat TOML run configuration.
//!
//! Every key is optional; missing keys take the defaults of the core
//! library. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use cavity_raman::atomic::DriveConfig;
use cavity_raman::dynamics::{DetectionChain, ModelParams};
use cavity_raman::localization::{LocalizationParams, ScanOptions};
use cavity_raman::spectrum::{SidebandSpec, SweepSpec, SweptParameter};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega1_mhz: f64,
    pub omega2_mhz: f64,
    pub delta1_mhz: f64,
    pub delta2_mhz: f64,
    pub delta_c_mhz: f64,
    pub g_max_mhz: f64,
    pub g_obs_mhz: f64,
    pub kappa_mhz: f64,
    pub gamma1_mhz: f64,
    pub gamma2_mhz: f64,
    pub b_mt: f64,
    pub linewidth_drive_mhz: f64,
    pub linewidth_repump_mhz: f64,
    pub linewidth_cavity_mhz: f64,
    pub drive_config: DriveConfig,
    pub n_max: usize,

    pub sweep_start_mhz: f64,
    pub sweep_stop_mhz: f64,
    pub sweep_points: usize,
    pub swept_parameter: SweptParameter,
    /// Smallest prominence, counts/s, reported as a peak.
    pub min_prominence_cps: f64,

    pub cavity_output_coupling: f64,
    pub fiber: f64,
    pub filter_path: f64,
    pub detector_qe: f64,
    pub background_cps: f64,

    pub sigma_nm: f64,
    pub wavelength_nm: f64,
    pub phase_offset_rad: f64,
    pub ground_state_size_nm: f64,
    /// Mirror displacements of the standing-wave scan, nm.
    pub displacements_nm: Vec<f64>,
    /// Visibility converted to a wave-packet size by `localization`.
    pub visibility: f64,
    /// Two-photon detuning of the standing-wave scan. When absent the scan
    /// sits on the strongest resonance of the configured sweep range.
    pub scan_detuning_mhz: Option<f64>,
    pub quadrature_nodes: usize,
    pub interpolation_nodes: usize,

    pub axial_freq_mhz: f64,
    pub radial_freq_mhz: f64,
    pub axial_red_weight: f64,
    pub axial_blue_weight: f64,
    pub radial_red_weight: f64,
    pub radial_blue_weight: f64,

    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    /// Where to write a gnuplot script for the output file.
    pub plot_script: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let m = ModelParams::default();
        let s = SweepSpec::default();
        let c = DetectionChain::default();
        let l = LocalizationParams::default();
        let o = ScanOptions::default();
        let b = SidebandSpec::default();
        RunConfig {
            omega1_mhz: m.omega1_mhz,
            omega2_mhz: m.omega2_mhz,
            delta1_mhz: m.delta1_mhz,
            delta2_mhz: m.delta2_mhz,
            delta_c_mhz: m.delta_c_mhz,
            g_max_mhz: m.g_max_mhz,
            g_obs_mhz: m.g_obs_mhz,
            kappa_mhz: m.kappa_mhz,
            gamma1_mhz: m.gamma1_mhz,
            gamma2_mhz: m.gamma2_mhz,
            b_mt: m.b_mt,
            linewidth_drive_mhz: m.linewidth_drive_mhz,
            linewidth_repump_mhz: m.linewidth_repump_mhz,
            linewidth_cavity_mhz: m.linewidth_cavity_mhz,
            drive_config: m.drive_config,
            n_max: m.n_max,
            sweep_start_mhz: s.start_mhz,
            sweep_stop_mhz: s.stop_mhz,
            sweep_points: s.points,
            swept_parameter: s.swept_parameter,
            min_prominence_cps: 20.0,
            cavity_output_coupling: c.cavity_output_coupling,
            fiber: c.fiber,
            filter_path: c.filter_path,
            detector_qe: c.detector_qe,
            background_cps: c.background_cps,
            sigma_nm: l.sigma_nm,
            wavelength_nm: l.wavelength_nm,
            phase_offset_rad: l.phase_offset_rad,
            ground_state_size_nm: l.ground_state_size_nm,
            displacements_nm: (0..=40)
                .map(|i| f64::from(i) * l.wavelength_nm / 40.0)
                .collect(),
            visibility: 0.60,
            scan_detuning_mhz: None,
            quadrature_nodes: o.quadrature_nodes,
            interpolation_nodes: o.interpolation_nodes,
            axial_freq_mhz: b.axial_freq_mhz,
            radial_freq_mhz: b.radial_freq_mhz,
            axial_red_weight: b.axial_red_weight,
            axial_blue_weight: b.axial_blue_weight,
            radial_red_weight: b.radial_red_weight,
            radial_blue_weight: b.radial_blue_weight,
            workers: 1,
            format: OutputFormat::Csv,
            output: None,
            plot_script: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.sweep().validate()?;
        self.chain().validate()?;
        self.localization().validate()?;
        self.sidebands().validate()?;
        if self.displacements_nm.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config("displacements_nm must be finite".into()));
        }
        if let Some(d) = self.scan_detuning_mhz {
            if !d.is_finite() {
                return Err(CliError::Config("scan_detuning_mhz must be finite".into()));
            }
        }
        if self.min_prominence_cps.is_nan() || self.min_prominence_cps < 0.0 {
            return Err(CliError::Config(
                "min_prominence_cps must be non-negative".into(),
            ));
        }
        if self.interpolation_nodes < 2 {
            return Err(CliError::Config(
                "interpolation_nodes must be at least 2".into(),
            ));
        }
        Ok(())
    }

    pub fn model(&self) -> ModelParams {
        ModelParams {
            omega1_mhz: self.omega1_mhz,
            omega2_mhz: self.omega2_mhz,
            delta1_mhz: self.delta1_mhz,
            delta2_mhz: self.delta2_mhz,
            delta_c_mhz: self.delta_c_mhz,
            g_max_mhz: self.g_max_mhz,
            g_obs_mhz: self.g_obs_mhz,
            kappa_mhz: self.kappa_mhz,
            gamma1_mhz: self.gamma1_mhz,
            gamma2_mhz: self.gamma2_mhz,
            b_mt: self.b_mt,
            linewidth_drive_mhz: self.linewidth_drive_mhz,
            linewidth_repump_mhz: self.linewidth_repump_mhz,
            linewidth_cavity_mhz: self.linewidth_cavity_mhz,
            drive_config: self.drive_config,
            n_max: self.n_max,
        }
    }

    pub fn sweep(&self) -> SweepSpec {
        SweepSpec {
            swept_parameter: self.swept_parameter,
            start_mhz: self.sweep_start_mhz,
            stop_mhz: self.sweep_stop_mhz,
            points: self.sweep_points,
            params: self.model(),
        }
    }

    pub fn chain(&self) -> DetectionChain {
        DetectionChain {
            cavity_output_coupling: self.cavity_output_coupling,
            fiber: self.fiber,
            filter_path: self.filter_path,
            detector_qe: self.detector_qe,
            background_cps: self.background_cps,
        }
    }

    pub fn localization(&self) -> LocalizationParams {
        LocalizationParams {
            sigma_nm: self.sigma_nm,
            wavelength_nm: self.wavelength_nm,
            phase_offset_rad: self.phase_offset_rad,
            ground_state_size_nm: self.ground_state_size_nm,
        }
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            quadrature_nodes: self.quadrature_nodes,
            interpolation_nodes: self.interpolation_nodes,
            workers: self.effective_workers(),
        }
    }

    pub fn sidebands(&self) -> SidebandSpec {
        SidebandSpec {
            axial_freq_mhz: self.axial_freq_mhz,
            radial_freq_mhz: self.radial_freq_mhz,
            axial_red_weight: self.axial_red_weight,
            axial_blue_weight: self.axial_blue_weight,
            radial_red_weight: self.radial_red_weight,
            radial_blue_weight: self.radial_blue_weight,
        }
    }

    pub fn effective_workers(&self) -> usize {
        if self.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.workers
        }
    }
}
