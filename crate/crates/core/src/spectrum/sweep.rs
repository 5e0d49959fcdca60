use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{rate_from_photon_numbers, solve_model, DetectionChain, ModelParams};
use crate::error::{DomainError, Error, NumericalError, Result};
use crate::parallel;

/// Which frequency is stepped to scan the two-photon detuning δ = Δ₁ - Δ_c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptParameter {
    #[default]
    DriveDetuning,
    CavityDetuning,
}

impl fmt::Display for SweptParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweptParameter::DriveDetuning => "drive_detuning",
            SweptParameter::CavityDetuning => "cavity_detuning",
        })
    }
}

impl FromStr for SweptParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "drive_detuning" => Ok(SweptParameter::DriveDetuning),
            "cavity_detuning" => Ok(SweptParameter::CavityDetuning),
            other => Err(format!("unknown swept parameter {other:?}")),
        }
    }
}

/// A uniform grid of two-photon detunings and the model evaluated on it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub swept_parameter: SweptParameter,
    pub start_mhz: f64,
    pub stop_mhz: f64,
    pub points: usize,
    pub params: ModelParams,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            swept_parameter: SweptParameter::DriveDetuning,
            start_mhz: -15.0,
            stop_mhz: 15.0,
            points: 241,
            params: ModelParams::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.points < 2 {
            return Err(DomainError::InvalidParameter {
                name: "sweep_points",
                value: self.points as f64,
                reason: "a sweep needs at least 2 points",
            });
        }
        if !(self.start_mhz.is_finite()
            && self.stop_mhz.is_finite()
            && self.start_mhz < self.stop_mhz)
        {
            return Err(DomainError::InvalidParameter {
                name: "sweep_start_mhz",
                value: self.start_mhz,
                reason: "start must be finite and below stop",
            });
        }
        self.params.validate()
    }

    /// Grid points, ascending; the first and last equal start and stop exactly.
    pub fn grid(&self) -> Vec<f64> {
        let step = (self.stop_mhz - self.start_mhz) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop_mhz
                } else {
                    self.start_mhz + step * i as f64
                }
            })
            .collect()
    }

    pub fn params_at(&self, detuning_mhz: f64) -> ModelParams {
        match self.swept_parameter {
            SweptParameter::DriveDetuning => self.params.with_drive_detuning(detuning_mhz),
            SweptParameter::CavityDetuning => self.params.with_cavity_detuning(detuning_mhz),
        }
    }
}

/// One sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    /// Two-photon detuning δ, MHz.
    pub detuning_mhz: f64,
    pub n_h: f64,
    pub n_v: f64,
    pub rate_h_cps: f64,
    pub rate_v_cps: f64,
    pub rate_total_cps: f64,
    pub residual: f64,
    /// Largest top-Fock population over both modes.
    pub top_fock_population: f64,
}

/// Steady state of `params` reduced to one spectrum record.
pub fn solve_point(
    params: &ModelParams,
    detuning_mhz: f64,
    chain: &DetectionChain,
) -> Result<SpectrumRecord> {
    let ss = solve_model(params)?;
    let n = &ss.observables.photon_number;
    // Expectation values of positive operators may come out at -1e-17.
    let n_h = n[0].max(0.0);
    let n_v = n.get(1).copied().unwrap_or(0.0).max(0.0);
    let rate = rate_from_photon_numbers(n_h, n_v, params.kappa_mhz, chain);
    Ok(SpectrumRecord {
        detuning_mhz,
        n_h,
        n_v,
        rate_h_cps: rate.h_cps,
        rate_v_cps: rate.v_cps,
        rate_total_cps: rate.total_cps,
        residual: ss.solution.residual_norm,
        top_fock_population: ss.observables.max_top_fock_population(),
    })
}

/// Runs the sweep on up to `workers` threads. Output order and values do
/// not depend on `workers`.
pub fn sweep_spectrum(
    spec: &SweepSpec,
    chain: &DetectionChain,
    workers: usize,
) -> Result<Vec<SpectrumRecord>> {
    spec.validate()?;
    chain.validate()?;
    let grid = spec.grid();
    parallel::try_map_ordered(&grid, workers, |&delta| {
        solve_point(&spec.params_at(delta), delta, chain).map_err(|e| {
            Error::from(NumericalError::SweepPoint {
                detuning_mhz: delta,
                source: Box::new(e),
            })
        })
    })
}
