use serde::{Deserialize, Serialize};

use crate::atomic::{DriveConfig, ZeemanField};
use crate::error::DomainError;

/// Physical inputs of the ion-cavity model, all frequencies in linear MHz.
///
/// Detunings are signed, field minus atom: a laser 320 MHz to the red of its
/// transition has `delta1_mhz = -320`. Rates follow the half-width
/// convention, so the P → S population decay rate is 2·`gamma1_mhz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Drive (397 nm) Rabi frequency Ω₁.
    pub omega1_mhz: f64,
    /// Repump (866 nm) Rabi frequency Ω₂.
    pub omega2_mhz: f64,
    /// Drive detuning from S ↔ P.
    pub delta1_mhz: f64,
    /// Repump detuning from D ↔ P.
    pub delta2_mhz: f64,
    /// Cavity detuning from D ↔ P.
    pub delta_c_mhz: f64,
    /// Antinode atom-cavity coupling.
    pub g_max_mhz: f64,
    /// Motion-averaged coupling used by the spectra.
    pub g_obs_mhz: f64,
    /// Cavity field decay rate κ.
    pub kappa_mhz: f64,
    /// P → S half decay rate γ₁.
    pub gamma1_mhz: f64,
    /// P → D half decay rate γ₂.
    pub gamma2_mhz: f64,
    pub b_mt: f64,
    pub linewidth_drive_mhz: f64,
    pub linewidth_repump_mhz: f64,
    pub linewidth_cavity_mhz: f64,
    pub drive_config: DriveConfig,
    /// Fock truncation per cavity mode.
    pub n_max: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            omega1_mhz: 82.0,
            omega2_mhz: 7.7,
            delta1_mhz: -320.0,
            delta2_mhz: -0.5,
            delta_c_mhz: -320.0,
            g_max_mhz: 1.61,
            g_obs_mhz: 1.4,
            kappa_mhz: 0.054,
            gamma1_mhz: 10.3,
            gamma2_mhz: 0.845,
            b_mt: 0.28,
            linewidth_drive_mhz: 0.030,
            linewidth_repump_mhz: 0.150,
            linewidth_cavity_mhz: 0.050,
            drive_config: DriveConfig::Pi,
            n_max: 2,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), DomainError> {
        let finite = [
            ("omega1_mhz", self.omega1_mhz),
            ("omega2_mhz", self.omega2_mhz),
            ("delta1_mhz", self.delta1_mhz),
            ("delta2_mhz", self.delta2_mhz),
            ("delta_c_mhz", self.delta_c_mhz),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(DomainError::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        let non_negative = [
            ("omega1_mhz", self.omega1_mhz),
            ("omega2_mhz", self.omega2_mhz),
            ("g_max_mhz", self.g_max_mhz),
            ("g_obs_mhz", self.g_obs_mhz),
            ("kappa_mhz", self.kappa_mhz),
            ("gamma1_mhz", self.gamma1_mhz),
            ("gamma2_mhz", self.gamma2_mhz),
            ("linewidth_drive_mhz", self.linewidth_drive_mhz),
            ("linewidth_repump_mhz", self.linewidth_repump_mhz),
            ("linewidth_cavity_mhz", self.linewidth_cavity_mhz),
        ];
        for (name, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(DomainError::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and non-negative",
                });
            }
        }
        if self.g_obs_mhz > self.g_max_mhz {
            return Err(DomainError::InvalidParameter {
                name: "g_obs_mhz",
                value: self.g_obs_mhz,
                reason: "must not exceed g_max_mhz",
            });
        }
        if self.n_max < 1 {
            return Err(DomainError::InvalidTruncation(self.n_max));
        }
        ZeemanField::new(self.b_mt)?;
        Ok(())
    }

    pub fn field(&self) -> ZeemanField {
        ZeemanField::new(self.b_mt).expect("field validated with the parameters")
    }

    /// Two-photon detuning δ = Δ₁ - Δ_c.
    pub fn two_photon_detuning(&self) -> f64 {
        self.delta1_mhz - self.delta_c_mhz
    }

    /// Copy with the drive detuned by δ from the (unshifted) Raman resonance,
    /// cavity held fixed.
    pub fn with_drive_detuning(&self, delta_mhz: f64) -> Self {
        ModelParams {
            delta1_mhz: self.delta_c_mhz + delta_mhz,
            ..self.clone()
        }
    }

    /// Copy with the cavity moved so that δ = Δ₁ - Δ_c, drive held fixed.
    pub fn with_cavity_detuning(&self, delta_mhz: f64) -> Self {
        ModelParams {
            delta_c_mhz: self.delta1_mhz - delta_mhz,
            ..self.clone()
        }
    }
}

/// Photon detection chain behind the cavity output mirror.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionChain {
    pub cavity_output_coupling: f64,
    pub fiber: f64,
    pub filter_path: f64,
    /// Mean quantum efficiency of the two detectors.
    pub detector_qe: f64,
    /// Background count rate of both detectors together, counts/s.
    pub background_cps: f64,
}

impl Default for DetectionChain {
    fn default() -> Self {
        DetectionChain {
            cavity_output_coupling: 0.19,
            fiber: 0.92,
            filter_path: 0.67,
            detector_qe: 0.415,
            background_cps: 300.0,
        }
    }
}

impl DetectionChain {
    pub fn validate(&self) -> Result<(), DomainError> {
        let factors = [
            ("cavity_output_coupling", self.cavity_output_coupling),
            ("fiber", self.fiber),
            ("filter_path", self.filter_path),
            ("detector_qe", self.detector_qe),
        ];
        for (name, value) in factors {
            if !(value > 0.0 && value <= 1.0) {
                return Err(DomainError::InvalidParameter {
                    name,
                    value,
                    reason: "efficiency must lie in (0, 1]",
                });
            }
        }
        if !(self.background_cps.is_finite() && self.background_cps >= 0.0) {
            return Err(DomainError::InvalidParameter {
                name: "background_cps",
                value: self.background_cps,
                reason: "must be finite and non-negative",
            });
        }
        Ok(())
    }

    /// Probability that an intracavity photon leaving through the output
    /// mirror is registered.
    pub fn total_efficiency(&self) -> f64 {
        self.cavity_output_coupling * self.fiber * self.filter_path * self.detector_qe
    }
}
