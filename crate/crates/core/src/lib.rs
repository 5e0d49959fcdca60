//! Master-equation model of vacuum-stimulated Raman spectroscopy with a
//! single ⁴⁰Ca⁺ ion in a two-mode optical cavity.
//!
//! The crate is layered bottom-up:
//!
//! * [`atomic`]: sublevels, Landé factors, Zeeman shifts, Clebsch-Gordan
//!   coefficients and the Raman line tables, in exact rational arithmetic.
//! * [`operators`]: sparse complex matrices, the atom ⊗ cavity space and
//!   the Lindblad superoperator.
//! * [`dynamics`]: Hamiltonian and collapse operators of the driven
//!   ion-cavity system, steady states, time evolution and detected rates.
//! * [`spectrum`]: detuning sweeps, peak extraction and analytic overlays.
//! * [`localization`]: standing-wave visibility and wave-packet size.
//!
//! Sweeps run through [`parallel::map_ordered`], which uses rayon when the
//! `parallel` feature is enabled and a plain loop otherwise.

pub mod atomic;
pub mod dynamics;
pub mod error;
pub mod localization;
pub mod operators;
pub mod parallel;
pub mod spectrum;

pub use error::{DomainError, Error, NumericalError, Result};
