//! Level structure of the S1/2, P1/2 and D3/2 manifolds of a singly ionised
//! calcium ion: sublevels, Landé factors, linear Zeeman shifts and the
//! Raman line tables built on top of them.

mod cg;
mod lines;

use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::DomainError;

pub use cg::{cg_amplitude, cg_signed_square, dipole_weight};
pub use lines::{
    effective_lines, raman_lines, CavityPolarization, DriveConfig, EffectiveLine, LineLabel,
    PositionedLine, RamanLine, StokesPolarization,
};

/// Bohr magneton over Planck's constant, in MHz per millitesla.
pub const BOHR_MHZ_PER_MT: f64 = 13.996;

/// A half-integer quantum number stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i32) -> Self {
        HalfInt(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn as_rational(self) -> Rational64 {
        Rational64::new(i64::from(self.0), 2)
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn neg(self) -> Self {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Fine-structure manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Manifold {
    S12,
    P12,
    D32,
}

impl Manifold {
    pub const ALL: [Manifold; 3] = [Manifold::S12, Manifold::P12, Manifold::D32];

    /// Orbital angular momentum L (0 = S, 1 = P, 2 = D).
    pub const fn orbital(self) -> i32 {
        match self {
            Manifold::S12 => 0,
            Manifold::P12 => 1,
            Manifold::D32 => 2,
        }
    }

    pub const fn j(self) -> HalfInt {
        match self {
            Manifold::S12 | Manifold::P12 => HalfInt::from_twice(1),
            Manifold::D32 => HalfInt::from_twice(3),
        }
    }

    /// Landé factor of the manifold (electron spin 1/2).
    pub fn g_factor(self) -> Rational64 {
        lande_g(self.orbital(), HalfInt::from_twice(1), self.j())
            .expect("manifold quantum numbers are always a valid coupling")
    }

    /// Number of magnetic sublevels, 2J + 1.
    pub const fn multiplicity(self) -> usize {
        (self.j().twice() + 1) as usize
    }

    /// Offset of the manifold's first sublevel in [`AtomicLevel::ALL`].
    pub const fn offset(self) -> usize {
        match self {
            Manifold::S12 => 0,
            Manifold::P12 => 2,
            Manifold::D32 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Manifold::S12 => "S1/2",
            Manifold::P12 => "P1/2",
            Manifold::D32 => "D3/2",
        }
    }
}

/// One Zeeman sublevel |L_J, m_J⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicLevel {
    manifold: Manifold,
    m: HalfInt,
}

impl AtomicLevel {
    /// Number of sublevels in the model: 2 S + 2 P + 4 D.
    pub const COUNT: usize = 8;

    /// All sublevels in basis order: S(-1/2, +1/2), P(-1/2, +1/2), D(-3/2..+3/2).
    pub const ALL: [AtomicLevel; 8] = [
        AtomicLevel::raw(Manifold::S12, -1),
        AtomicLevel::raw(Manifold::S12, 1),
        AtomicLevel::raw(Manifold::P12, -1),
        AtomicLevel::raw(Manifold::P12, 1),
        AtomicLevel::raw(Manifold::D32, -3),
        AtomicLevel::raw(Manifold::D32, -1),
        AtomicLevel::raw(Manifold::D32, 1),
        AtomicLevel::raw(Manifold::D32, 3),
    ];

    const fn raw(manifold: Manifold, twice_m: i32) -> Self {
        AtomicLevel {
            manifold,
            m: HalfInt::from_twice(twice_m),
        }
    }

    /// Builds a sublevel from its manifold and twice its projection.
    pub fn new(manifold: Manifold, twice_m: i32) -> Result<Self, DomainError> {
        let j2 = manifold.j().twice();
        if twice_m.abs() > j2 || (twice_m - j2) % 2 != 0 {
            return Err(DomainError::InvalidProjection {
                manifold: manifold.name(),
                twice_m,
            });
        }
        Ok(Self::raw(manifold, twice_m))
    }

    pub fn s(twice_m: i32) -> Self {
        Self::new(Manifold::S12, twice_m).expect("invalid S1/2 projection")
    }

    pub fn p(twice_m: i32) -> Self {
        Self::new(Manifold::P12, twice_m).expect("invalid P1/2 projection")
    }

    pub fn d(twice_m: i32) -> Self {
        Self::new(Manifold::D32, twice_m).expect("invalid D3/2 projection")
    }

    pub const fn manifold(self) -> Manifold {
        self.manifold
    }

    pub const fn m(self) -> HalfInt {
        self.m
    }

    pub const fn j(self) -> HalfInt {
        self.manifold.j()
    }

    pub const fn orbital(self) -> i32 {
        self.manifold.orbital()
    }

    /// Position of this sublevel in [`AtomicLevel::ALL`].
    pub const fn index(self) -> usize {
        let j2 = self.manifold.j().twice();
        self.manifold.offset() + ((self.m.twice() + j2) / 2) as usize
    }

    /// The sublevel with the opposite projection.
    pub const fn mirrored(self) -> Self {
        AtomicLevel {
            manifold: self.manifold,
            m: self.m.neg(),
        }
    }

    /// All sublevels of one manifold, ascending in m.
    pub fn manifold_levels(manifold: Manifold) -> impl Iterator<Item = AtomicLevel> {
        Self::ALL
            .into_iter()
            .filter(move |l| l.manifold == manifold)
    }
}

impl fmt::Display for AtomicLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.m.twice() > 0 { "+" } else { "" };
        write!(f, "|{}, {}{}⟩", self.manifold.name(), sign, self.m)
    }
}

/// Landé g-factor g = 1 + [J(J+1) + S(S+1) - L(L+1)] / (2 J(J+1)).
pub fn lande_g(l: i32, s: HalfInt, j: HalfInt) -> Result<Rational64, DomainError> {
    let l2 = 2 * l;
    let (s2, j2) = (s.twice(), j.twice());
    let valid = l >= 0
        && s2 >= 0
        && j2 > 0
        && j2 >= (l2 - s2).abs()
        && j2 <= l2 + s2
        && (l2 + s2 - j2) % 2 == 0;
    if !valid {
        return Err(DomainError::InvalidCoupling {
            l,
            twice_s: s2,
            twice_j: j2,
        });
    }
    // Everything in units of 1/4 to stay integral: X(X+1) = x2 (x2 + 2) / 4.
    let jj = i64::from(j2 * (j2 + 2));
    let ss = i64::from(s2 * (s2 + 2));
    let ll = i64::from(l2 * (l2 + 2));
    Ok(Rational64::from_integer(1) + Rational64::new(jj + ss - ll, 2 * jj))
}

/// Uniform magnetic field along the quantization axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeemanField {
    b_mt: f64,
}

impl ZeemanField {
    pub fn new(b_mt: f64) -> Result<Self, DomainError> {
        if !(b_mt.is_finite() && b_mt >= 0.0) {
            return Err(DomainError::NegativeField(b_mt));
        }
        Ok(ZeemanField { b_mt })
    }

    pub fn millitesla(self) -> f64 {
        self.b_mt
    }

    /// μ_B B / h in MHz.
    pub fn bohr_frequency_mhz(self) -> f64 {
        BOHR_MHZ_PER_MT * self.b_mt
    }
}

/// Linear Zeeman shift ΔE = -m_J g μ_B B of a sublevel, in MHz.
pub fn zeeman_shift(level: AtomicLevel, field: ZeemanField) -> f64 {
    let factor = -level.m.as_rational() * level.manifold.g_factor();
    rational_to_f64(factor) * field.bohr_frequency_mhz()
}

pub(crate) fn rational_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
