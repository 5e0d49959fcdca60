//! The twelve S1/2 → D3/2 vacuum-stimulated Raman lines and their effective
//! strengths for the two drive-laser configurations.

use num_traits::Signed;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::{rational_to_f64, AtomicLevel, Manifold, ZeemanField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LineLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
}

impl LineLabel {
    pub const ALL: [LineLabel; 12] = [
        LineLabel::A,
        LineLabel::B,
        LineLabel::C,
        LineLabel::D,
        LineLabel::E,
        LineLabel::F,
        LineLabel::G,
        LineLabel::H,
        LineLabel::I,
        LineLabel::J,
        LineLabel::K,
        LineLabel::L,
    ];

    /// Partner line under m → -m.
    pub fn mirror(self) -> LineLabel {
        use LineLabel::*;
        match self {
            A => F,
            B => E,
            C => D,
            D => C,
            E => B,
            F => A,
            G => L,
            H => K,
            I => J,
            J => I,
            K => H,
            L => G,
        }
    }
}

impl fmt::Display for LineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for LineLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LineLabel::ALL
            .into_iter()
            .find(|l| l.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown line label {s:?}"))
    }
}

/// Polarization of the Stokes photon, q = m_D - m_P.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StokesPolarization {
    Pi,
    SigmaPlus,
    SigmaMinus,
}

impl StokesPolarization {
    fn from_q(twice_q: i32) -> Self {
        match twice_q {
            0 => StokesPolarization::Pi,
            2 => StokesPolarization::SigmaPlus,
            -2 => StokesPolarization::SigmaMinus,
            _ => unreachable!("dipole transitions change m by at most one"),
        }
    }

    /// Cavity mode this component is projected onto: π along the field is
    /// horizontal, σ± perpendicular to it is vertical.
    pub fn cavity_polarization(self) -> CavityPolarization {
        match self {
            StokesPolarization::Pi => CavityPolarization::H,
            _ => CavityPolarization::V,
        }
    }
}

/// Linear drive polarization parallel (π) or perpendicular (σ) to the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveConfig {
    #[default]
    Pi,
    Sigma,
}

impl DriveConfig {
    /// Squared projection of the drive field onto the addressed transition.
    pub fn projection(self) -> Rational64 {
        match self {
            DriveConfig::Pi => Rational64::from_integer(1),
            DriveConfig::Sigma => Rational64::new(1, 2),
        }
    }

    /// Lines addressed in this configuration.
    pub fn labels(self) -> &'static [LineLabel] {
        match self {
            DriveConfig::Pi => &LineLabel::ALL[..6],
            DriveConfig::Sigma => &LineLabel::ALL[6..],
        }
    }
}

impl fmt::Display for DriveConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DriveConfig::Pi => "pi",
            DriveConfig::Sigma => "sigma",
        })
    }
}

impl FromStr for DriveConfig {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pi" => Ok(DriveConfig::Pi),
            "sigma" => Ok(DriveConfig::Sigma),
            other => Err(format!("unknown drive configuration {other:?}")),
        }
    }
}

/// Cavity polarization mode: H along the magnetic field, V perpendicular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CavityPolarization {
    H,
    V,
}

impl CavityPolarization {
    /// Squared projection of the Stokes dipole onto the cavity mode.
    pub fn projection(self) -> Rational64 {
        match self {
            CavityPolarization::H => Rational64::from_integer(1),
            CavityPolarization::V => Rational64::new(1, 2),
        }
    }
}

/// One row of the Raman line table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RamanLine {
    pub label: LineLabel,
    pub initial: AtomicLevel,
    pub intermediate: AtomicLevel,
    pub final_level: AtomicLevel,
    /// Line position in units of μ_B B / h.
    pub shift_factor: Rational64,
    pub strength: Rational64,
    pub stokes_polarization: StokesPolarization,
}

impl RamanLine {
    pub fn position_mhz(&self, field: ZeemanField) -> f64 {
        rational_to_f64(self.shift_factor) * field.bohr_frequency_mhz()
    }

    /// (m_D g_D - m_S g_S), recomputed from the Landé factors.
    pub fn derived_shift_factor(&self) -> Rational64 {
        self.final_level.m().as_rational() * Manifold::D32.g_factor()
            - self.initial.m().as_rational() * Manifold::S12.g_factor()
    }

    /// Product of the squared normalised dipole amplitudes of the drive
    /// (S → P) and Stokes (P → D) legs.
    pub fn derived_strength(&self) -> Rational64 {
        super::cg::dipole_signed_square(self.initial, self.intermediate).abs()
            * super::cg::dipole_signed_square(self.final_level, self.intermediate).abs()
    }
}

/// (label, 2m_S, 2m_P, 2m_D, shift factor, strength)
type TableRow = (LineLabel, i32, i32, i32, (i64, i64), (i64, i64));

const TABLE: [TableRow; 12] = [
    (LineLabel::A, 1, 1, -1, (-7, 5), (1, 18)),
    (LineLabel::B, 1, 1, 1, (-3, 5), (1, 9)),
    (LineLabel::C, 1, 1, 3, (1, 5), (1, 6)),
    (LineLabel::D, -1, -1, -3, (-1, 5), (1, 6)),
    (LineLabel::E, -1, -1, -1, (3, 5), (1, 9)),
    (LineLabel::F, -1, -1, 1, (7, 5), (1, 18)),
    (LineLabel::G, 1, -1, -3, (-11, 5), (1, 3)),
    (LineLabel::H, 1, -1, -1, (-7, 5), (2, 9)),
    (LineLabel::I, 1, -1, 1, (-3, 5), (1, 9)),
    (LineLabel::J, -1, 1, -1, (3, 5), (1, 9)),
    (LineLabel::K, -1, 1, 1, (7, 5), (2, 9)),
    (LineLabel::L, -1, 1, 3, (11, 5), (1, 3)),
];

fn table_line(row: &TableRow) -> RamanLine {
    let &(label, ms, mp, md, (sn, sd), (wn, wd)) = row;
    RamanLine {
        label,
        initial: AtomicLevel::s(ms),
        intermediate: AtomicLevel::p(mp),
        final_level: AtomicLevel::d(md),
        shift_factor: Rational64::new(sn, sd),
        strength: Rational64::new(wn, wd),
        stokes_polarization: StokesPolarization::from_q(md - mp),
    }
}

impl LineLabel {
    pub fn line(self) -> RamanLine {
        table_line(&TABLE[self as usize])
    }
}

/// A Raman line together with its resonance position at a given field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionedLine {
    pub line: RamanLine,
    pub position_mhz: f64,
}

/// All twelve lines with positions shift_factor · μ_B B / h.
pub fn raman_lines(field: ZeemanField) -> Vec<PositionedLine> {
    TABLE
        .iter()
        .map(|row| {
            let line = table_line(row);
            PositionedLine {
                line,
                position_mhz: line.position_mhz(field),
            }
        })
        .collect()
}

/// A Raman line as seen through the drive and cavity polarization projections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveLine {
    pub line: RamanLine,
    pub drive_config: DriveConfig,
    pub effective_strength: Rational64,
    pub cavity_polarization: CavityPolarization,
    pub position_mhz: f64,
}

/// The six lines addressed by `drive_config`, with projection-corrected strengths.
pub fn effective_lines(drive_config: DriveConfig, field: ZeemanField) -> Vec<EffectiveLine> {
    drive_config
        .labels()
        .iter()
        .map(|label| {
            let line = label.line();
            let cavity_polarization = line.stokes_polarization.cavity_polarization();
            EffectiveLine {
                line,
                drive_config,
                effective_strength: line.strength
                    * drive_config.projection()
                    * cavity_polarization.projection(),
                cavity_polarization,
                position_mhz: line.position_mhz(field),
            }
        })
        .collect()
}
