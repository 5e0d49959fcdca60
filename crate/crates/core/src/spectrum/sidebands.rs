use serde::{Deserialize, Serialize};

use crate::atomic::{CavityPolarization, EffectiveLine, LineLabel};
use crate::error::DomainError;

/// Trap frequencies and relative strengths of first-order motional sidebands.
///
/// The red sideband of a carrier at δ₀ sits at δ₀ − f, the blue one at δ₀ + f.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SidebandSpec {
    pub axial_freq_mhz: f64,
    pub radial_freq_mhz: f64,
    pub axial_red_weight: f64,
    pub axial_blue_weight: f64,
    pub radial_red_weight: f64,
    pub radial_blue_weight: f64,
}

impl Default for SidebandSpec {
    fn default() -> Self {
        SidebandSpec {
            axial_freq_mhz: 1.08,
            radial_freq_mhz: 2.92,
            axial_red_weight: 0.3,
            axial_blue_weight: 0.3,
            radial_red_weight: 0.15,
            radial_blue_weight: 0.15,
        }
    }
}

impl SidebandSpec {
    pub fn validate(&self) -> Result<(), DomainError> {
        for (name, value) in [
            ("axial_freq_mhz", self.axial_freq_mhz),
            ("radial_freq_mhz", self.radial_freq_mhz),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(DomainError::InvalidParameter {
                    name,
                    value,
                    reason: "trap frequency must be positive",
                });
            }
        }
        for (name, value) in [
            ("axial_red_weight", self.axial_red_weight),
            ("axial_blue_weight", self.axial_blue_weight),
            ("radial_red_weight", self.radial_red_weight),
            ("radial_blue_weight", self.radial_blue_weight),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(DomainError::InvalidParameter {
                    name,
                    value,
                    reason: "sideband weight must be non-negative",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    Carrier,
    AxialRed,
    AxialBlue,
    RadialRed,
    RadialBlue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayLine {
    pub label: LineLabel,
    pub kind: LineKind,
    pub position_mhz: f64,
    pub strength: f64,
    pub polarization: CavityPolarization,
}

/// Carriers followed by their nonzero-weight sidebands, carrier by carrier.
pub fn sideband_overlay(lines: &[EffectiveLine], sidebands: &SidebandSpec) -> Vec<OverlayLine> {
    let companions = [
        (
            LineKind::AxialRed,
            -sidebands.axial_freq_mhz,
            sidebands.axial_red_weight,
        ),
        (
            LineKind::AxialBlue,
            sidebands.axial_freq_mhz,
            sidebands.axial_blue_weight,
        ),
        (
            LineKind::RadialRed,
            -sidebands.radial_freq_mhz,
            sidebands.radial_red_weight,
        ),
        (
            LineKind::RadialBlue,
            sidebands.radial_freq_mhz,
            sidebands.radial_blue_weight,
        ),
    ];
    let mut out = Vec::with_capacity(lines.len() * 5);
    for line in lines {
        let strength = crate::atomic::rational_to_f64(line.effective_strength);
        let carrier = OverlayLine {
            label: line.line.label,
            kind: LineKind::Carrier,
            position_mhz: line.position_mhz,
            strength,
            polarization: line.cavity_polarization,
        };
        out.push(carrier);
        for &(kind, offset, weight) in &companions {
            if weight > 0.0 {
                out.push(OverlayLine {
                    kind,
                    position_mhz: line.position_mhz + offset,
                    strength: strength * weight,
                    ..carrier
                });
            }
        }
    }
    out
}
