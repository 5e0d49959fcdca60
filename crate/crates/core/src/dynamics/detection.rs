use std::f64::consts::TAU;

use crate::dynamics::{DetectionChain, ModelParams};
use crate::operators::{DensityMatrix, HilbertSpace};

/// Detected count rates behind a polarizer selecting one cavity mode, and
/// without polarizer.
///
/// Each polarization-resolved channel carries the full detector background;
/// the unresolved total counts it once, so
/// `total_cps = h_cps + v_cps - background`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectedRate {
    pub h_cps: f64,
    pub v_cps: f64,
    pub total_cps: f64,
}

/// Photons per second leaving through both mirrors per unit ⟨a†a⟩: 2κ in s⁻¹.
pub fn photon_loss_rate_per_second(kappa_mhz: f64) -> f64 {
    2.0 * TAU * kappa_mhz * 1e6
}

/// Count rate above background from a mean intracavity photon number.
pub fn signal_rate(photon_number: f64, kappa_mhz: f64, chain: &DetectionChain) -> f64 {
    photon_loss_rate_per_second(kappa_mhz) * photon_number * chain.total_efficiency()
}

/// Rates from mean photon numbers of the H and V modes.
pub fn rate_from_photon_numbers(
    n_h: f64,
    n_v: f64,
    kappa_mhz: f64,
    chain: &DetectionChain,
) -> DetectedRate {
    let bg = chain.background_cps;
    let h = signal_rate(n_h, kappa_mhz, chain);
    let v = signal_rate(n_v, kappa_mhz, chain);
    DetectedRate {
        h_cps: h + bg,
        v_cps: v + bg,
        total_cps: h + v + bg,
    }
}

/// Detected rates for the state `rho` of the two-mode ion-cavity system.
/// A single-mode space is read as H only.
pub fn detected_rate(
    rho: &DensityMatrix,
    space: &HilbertSpace,
    params: &ModelParams,
    chain: &DetectionChain,
) -> DetectedRate {
    let n = |k: usize| {
        if k < space.mode_count() {
            rho.expectation(&space.number(k)).re
        } else {
            0.0
        }
    };
    rate_from_photon_numbers(n(0), n(1), params.kappa_mhz, chain)
}
