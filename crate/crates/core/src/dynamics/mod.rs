//! The driven ion-cavity system: model parameters, Hamiltonian and collapse
//! operators, steady states, time evolution and detected count rates.

mod detection;
mod evolve;
mod model;
mod params;
mod steady;

pub use detection::{
    detected_rate, photon_loss_rate_per_second, rate_from_photon_numbers, signal_rate, DetectedRate,
};
pub use evolve::{evolve, evolve_with, EvolveOptions};
pub use model::{build_collapse_ops, build_hamiltonian, Observables};
pub use params::{DetectionChain, ModelParams};
pub use steady::{steady_state, steady_state_with, SteadyStateOptions, SteadyStateSolution};

use crate::error::Result;
use crate::operators::{liouvillian, HilbertSpace, SparseMatrix};

/// Two-mode space with the truncation of `params`.
pub fn model_space(params: &ModelParams) -> Result<HilbertSpace> {
    Ok(HilbertSpace::two_mode(params.n_max)?)
}

/// Liouvillian of the full model on [`model_space`].
pub fn model_liouvillian(params: &ModelParams) -> Result<(HilbertSpace, SparseMatrix)> {
    let space = model_space(params)?;
    let h = build_hamiltonian(params, &space)?;
    let c = build_collapse_ops(params, &space)?;
    Ok((space, liouvillian(&h, &c)?))
}

/// Steady state of the full model together with its observables.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSteadyState {
    pub solution: SteadyStateSolution,
    pub observables: Observables,
    pub space: HilbertSpace,
}

impl ModelSteadyState {
    pub fn rate(&self, params: &ModelParams, chain: &DetectionChain) -> DetectedRate {
        detected_rate(&self.solution.rho, &self.space, params, chain)
    }
}

pub fn solve_model(params: &ModelParams) -> Result<ModelSteadyState> {
    let (space, l) = model_liouvillian(params)?;
    let solution = steady_state(&l)?;
    let observables = Observables::measure(&solution.rho, &space);
    Ok(ModelSteadyState {
        solution,
        observables,
        space,
    })
}
