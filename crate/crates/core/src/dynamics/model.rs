//! Rotating-frame Hamiltonian and collapse operators of the driven ion in
//! the two-mode cavity.
//!
//! Frame: S rotates with the drive laser, D with drive minus repump, and
//! cavity photons with the repump. Every coupling is then time independent
//! and the bare energies are
//!
//! ```text
//! E_S = 0,  E_P = -Δ₁,  E_D = Δ₂ - Δ₁,  E_photon = Δ_c - Δ₂
//! ```
//!
//! plus the Zeeman shift of each sublevel. |S, vac⟩ and |D, 1 photon⟩ are
//! degenerate when Δ₁ - Δ_c equals the difference of their Zeeman shifts.
//!
//! Dipole couplings use the normalised amplitudes of
//! [`dipole_weight`](crate::atomic::dipole_weight); linear polarization
//! perpendicular to the field decomposes into σ⁺ and σ⁻ with amplitudes
//! -1/√2 and +1/√2.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::atomic::{dipole_weight, zeeman_shift, AtomicLevel, DriveConfig, Manifold};
use crate::dynamics::ModelParams;
use crate::error::DomainError;
use crate::operators::{DensityMatrix, HilbertSpace, Mode, SparseMatrix, C64};

/// Amplitude of spherical component `twice_q / 2` in a field polarised
/// parallel (π) or perpendicular (σ) to the quantization axis.
fn polarization_component(config: DriveConfig, twice_q: i32) -> f64 {
    match (config, twice_q) {
        (DriveConfig::Pi, 0) => 1.0,
        (DriveConfig::Sigma, 2) => -FRAC_1_SQRT_2,
        (DriveConfig::Sigma, -2) => FRAC_1_SQRT_2,
        _ => 0.0,
    }
}

fn mode_polarization(mode: Mode) -> DriveConfig {
    match mode {
        Mode::H => DriveConfig::Pi,
        Mode::V => DriveConfig::Sigma,
    }
}

/// Bare rotating-frame energy of a sublevel, MHz (before Zeeman shift).
fn frame_energy(level: AtomicLevel, params: &ModelParams) -> f64 {
    match level.manifold() {
        Manifold::S12 => 0.0,
        Manifold::P12 => -params.delta1_mhz,
        Manifold::D32 => params.delta2_mhz - params.delta1_mhz,
    }
}

/// Coupling matrix element between a lower sublevel and a P sublevel for a
/// field of the given polarization, or zero if dipole forbidden.
fn coupling(lower: AtomicLevel, upper: AtomicLevel, polarization: DriveConfig) -> f64 {
    let twice_q = upper.m().twice() - lower.m().twice();
    polarization_component(polarization, twice_q) * dipole_weight(lower, upper)
}

/// Hermitian rotating-frame Hamiltonian in rad/µs (2π × MHz).
///
/// The space must have one or two cavity modes (H, then V).
pub fn build_hamiltonian(
    params: &ModelParams,
    space: &HilbertSpace,
) -> Result<SparseMatrix, DomainError> {
    params.validate()?;
    if space.mode_count() == 0 || space.mode_count() > 2 {
        return Err(DomainError::Other(format!(
            "the ion-cavity model needs one or two cavity modes, got {}",
            space.mode_count()
        )));
    }
    let field = params.field();
    let dim = space.total_dim();
    let photon_energy = params.delta_c_mhz - params.delta2_mhz;

    let mut triplets = Vec::new();
    for idx in 0..dim {
        let (atom, photons) = space.decompose(idx);
        let level = AtomicLevel::ALL[atom];
        let n: usize = photons.iter().sum();
        let e = frame_energy(level, params) + zeeman_shift(level, field) + photon_energy * n as f64;
        triplets.push((idx, idx, C64::new(TAU * e, 0.0)));
    }
    let mut h = SparseMatrix::from_triplets(dim, dim, triplets);

    let mut add_hc = |op: SparseMatrix, amplitude: f64| {
        if amplitude != 0.0 {
            let term = op.scale_real(amplitude);
            h = h.add(&term).add(&term.adjoint());
        }
    };

    for p in AtomicLevel::manifold_levels(Manifold::P12) {
        for s in AtomicLevel::manifold_levels(Manifold::S12) {
            let amp = TAU * 0.5 * params.omega1_mhz * coupling(s, p, params.drive_config);
            add_hc(space.atomic_transfer(s, p), amp);
        }
        for d in AtomicLevel::manifold_levels(Manifold::D32) {
            let amp = TAU * 0.5 * params.omega2_mhz * coupling(d, p, DriveConfig::Sigma);
            add_hc(space.atomic_transfer(d, p), amp);
            for (k, mode) in Mode::BOTH.into_iter().take(space.mode_count()).enumerate() {
                let amp = TAU * params.g_obs_mhz * coupling(d, p, mode_polarization(mode));
                if amp != 0.0 {
                    // |P⟩⟨D| a: absorbing a cavity photon lifts D to P.
                    let op = space.atomic_transfer(d, p).matmul(&space.annihilation(k));
                    add_hc(op, amp);
                }
            }
        }
    }
    Ok(h)
}

/// Collapse operators, in √(rad/µs).
///
/// Spontaneous emission is grouped by photon polarization q so that decay
/// paths with the same q interfere; cavity loss acts on each mode; laser
/// and cavity linewidths enter as dephasing of the S manifold, the D
/// manifold and the photon number. Zero-rate channels are omitted.
pub fn build_collapse_ops(
    params: &ModelParams,
    space: &HilbertSpace,
) -> Result<Vec<SparseMatrix>, DomainError> {
    params.validate()?;
    let mut ops = Vec::new();
    let zero = SparseMatrix::zeros(space.total_dim(), space.total_dim());

    for (lower, half_rate) in [
        (Manifold::S12, params.gamma1_mhz),
        (Manifold::D32, params.gamma2_mhz),
    ] {
        if half_rate == 0.0 {
            continue;
        }
        let amp = (2.0 * TAU * half_rate).sqrt();
        for twice_q in [-2, 0, 2] {
            let mut op = zero.clone();
            for p in AtomicLevel::manifold_levels(Manifold::P12) {
                for g in AtomicLevel::manifold_levels(lower) {
                    if p.m().twice() - g.m().twice() == twice_q {
                        let w = dipole_weight(g, p);
                        if w != 0.0 {
                            op = op.add(&space.atomic_transfer(p, g).scale_real(amp * w));
                        }
                    }
                }
            }
            if op.nnz() > 0 {
                ops.push(op);
            }
        }
    }

    if params.kappa_mhz > 0.0 {
        let amp = (2.0 * TAU * params.kappa_mhz).sqrt();
        for k in 0..space.mode_count() {
            ops.push(space.annihilation(k).scale_real(amp));
        }
    }

    let dephasing = [
        (
            params.linewidth_drive_mhz,
            space.manifold_projector(Manifold::S12),
        ),
        (
            params.linewidth_repump_mhz,
            space.manifold_projector(Manifold::D32),
        ),
        (params.linewidth_cavity_mhz, space.total_number()),
    ];
    for (width, op) in dephasing {
        if width > 0.0 {
            ops.push(op.scale_real((2.0 * TAU * width).sqrt()));
        }
    }
    Ok(ops)
}

/// Expectation values derived from a state of the ion-cavity system.
#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    /// ⟨a†a⟩ per cavity mode.
    pub photon_number: Vec<f64>,
    /// Population of the highest retained Fock state, per mode.
    pub top_fock_population: Vec<f64>,
    /// Total population of S, P, D.
    pub manifold_population: [f64; 3],
    /// Population of every atomic sublevel, in [`AtomicLevel::ALL`] order.
    pub level_population: [f64; 8],
}

impl Observables {
    pub fn measure(rho: &DensityMatrix, space: &HilbertSpace) -> Self {
        let modes = 0..space.mode_count();
        let photon_number = modes
            .clone()
            .map(|k| rho.expectation(&space.number(k)).re)
            .collect();
        let top_fock_population = modes
            .map(|k| rho.expectation(&space.top_fock_projector(k)).re)
            .collect();
        let mut level_population = [0.0; 8];
        for idx in 0..space.total_dim() {
            let (atom, _) = space.decompose(idx);
            level_population[atom] += rho.population(idx);
        }
        let mut manifold_population = [0.0; 3];
        for (level, pop) in AtomicLevel::ALL.iter().zip(level_population) {
            let slot = match level.manifold() {
                Manifold::S12 => 0,
                Manifold::P12 => 1,
                Manifold::D32 => 2,
            };
            manifold_population[slot] += pop;
        }
        Observables {
            photon_number,
            top_fock_population,
            manifold_population,
            level_population,
        }
    }

    pub fn total_photon_number(&self) -> f64 {
        self.photon_number.iter().sum()
    }

    pub fn max_top_fock_population(&self) -> f64 {
        self.top_fock_population.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::raman_lines;

    fn all_off() -> ModelParams {
        ModelParams {
            omega1_mhz: 0.0,
            omega2_mhz: 0.0,
            delta1_mhz: 0.0,
            delta2_mhz: 0.0,
            delta_c_mhz: 0.0,
            g_max_mhz: 0.0,
            g_obs_mhz: 0.0,
            b_mt: 0.0,
            ..ModelParams::default()
        }
    }

    #[test]
    fn fields_off_gives_zero_hamiltonian() {
        let space = HilbertSpace::two_mode(1).unwrap();
        let h = build_hamiltonian(&all_off(), &space).unwrap();
        assert_eq!(h.nnz(), 0);
    }

    #[test]
    fn hamiltonian_is_exactly_hermitian() {
        let space = HilbertSpace::two_mode(2).unwrap();
        for config in [DriveConfig::Pi, DriveConfig::Sigma] {
            let params = ModelParams {
                drive_config: config,
                ..ModelParams::default()
            };
            let h = build_hamiltonian(&params, &space).unwrap();
            assert_eq!(h.hermiticity_error(), 0.0);
        }
    }

    #[test]
    fn zeeman_term_on_the_diagonal() {
        let space = HilbertSpace::two_mode(1).unwrap();
        let params = ModelParams {
            b_mt: 0.28,
            ..all_off()
        };
        let h = build_hamiltonian(&params, &space).unwrap();
        let k = space.index(AtomicLevel::s(1), &[0, 0]);
        assert!((h.get(k, k).re / TAU - (-3.919)).abs() < 5e-4);
    }

    #[test]
    fn raman_degeneracy_bookkeeping() {
        // |S, m_S; vac⟩ and |D, m_D; one photon⟩ are degenerate exactly when
        // Δ₁ - Δ_c equals the Zeeman difference E_Z(D) - E_Z(S).
        let space = HilbertSpace::two_mode(1).unwrap();
        let base = ModelParams {
            b_mt: 0.61,
            ..ModelParams::default()
        };
        let field = base.field();
        for pl in raman_lines(field) {
            let line = pl.line;
            let shift = zeeman_shift(line.final_level, field) - zeeman_shift(line.initial, field);
            let params = base.with_drive_detuning(shift);
            let h = build_hamiltonian(&params, &space).unwrap();
            let photons = match line.stokes_polarization.cavity_polarization() {
                crate::atomic::CavityPolarization::H => [1, 0],
                crate::atomic::CavityPolarization::V => [0, 1],
            };
            let ks = space.index(line.initial, &[0, 0]);
            let kd = space.index(line.final_level, &photons);
            assert!(
                (h.get(ks, ks) - h.get(kd, kd)).norm() < 1e-9,
                "{}",
                line.label
            );
            // The shift is the table position with the opposite sign.
            assert!((shift + pl.position_mhz).abs() < 1e-12);
        }
    }

    #[test]
    fn polarization_selects_cavity_mode() {
        let space = HilbertSpace::two_mode(1).unwrap();
        let h = build_hamiltonian(&ModelParams::default(), &space).unwrap();
        // π Stokes: |P,+1/2; 0,0⟩ ↔ |D,+1/2; 1,0⟩ only through H.
        let p = space.index(AtomicLevel::p(1), &[0, 0]);
        assert!(h.get(p, space.index(AtomicLevel::d(1), &[1, 0])).norm() > 0.0);
        assert_eq!(
            h.get(p, space.index(AtomicLevel::d(1), &[0, 1])).norm(),
            0.0
        );
        // σ Stokes: |P,+1/2⟩ ↔ |D,+3/2; 0,1⟩ only through V.
        assert!(h.get(p, space.index(AtomicLevel::d(3), &[0, 1])).norm() > 0.0);
        assert_eq!(
            h.get(p, space.index(AtomicLevel::d(3), &[1, 0])).norm(),
            0.0
        );
        // Squared couplings reproduce the cavity projection factor 1/2.
        let gh = h.get(p, space.index(AtomicLevel::d(1), &[1, 0])).norm();
        let gv = h.get(p, space.index(AtomicLevel::d(-1), &[0, 1])).norm();
        let ratio = (gv / gh).powi(2);
        let expected = 0.5 * dipole_weight(AtomicLevel::d(-1), AtomicLevel::p(1)).powi(2)
            / dipole_weight(AtomicLevel::d(1), AtomicLevel::p(1)).powi(2);
        assert!((ratio - expected).abs() < 1e-12);
    }

    #[test]
    fn branching_completeness() {
        let space = HilbertSpace::new(vec![1]).unwrap();
        let params = ModelParams {
            kappa_mhz: 0.0,
            linewidth_drive_mhz: 0.0,
            linewidth_repump_mhz: 0.0,
            linewidth_cavity_mhz: 0.0,
            ..ModelParams::default()
        };
        let ops = build_collapse_ops(&params, &space).unwrap();
        assert_eq!(ops.len(), 6);
        for p in AtomicLevel::manifold_levels(Manifold::P12) {
            let col = space.index(p, &[0]);
            let (mut into_s, mut into_d) = (0.0, 0.0);
            for op in &ops {
                for (r, c, v) in op.iter() {
                    if c == col {
                        match AtomicLevel::ALL[space.decompose(r).0].manifold() {
                            Manifold::S12 => into_s += v.norm_sqr(),
                            Manifold::D32 => into_d += v.norm_sqr(),
                            Manifold::P12 => unreachable!(),
                        }
                    }
                }
            }
            assert!((into_s - 2.0 * TAU * params.gamma1_mhz).abs() < 1e-12);
            assert!((into_d - 2.0 * TAU * params.gamma2_mhz).abs() < 1e-12);
        }
    }

    #[test]
    fn dephasing_absent_without_linewidths() {
        let space = HilbertSpace::two_mode(1).unwrap();
        let with = build_collapse_ops(&ModelParams::default(), &space).unwrap();
        let without = build_collapse_ops(
            &ModelParams {
                linewidth_drive_mhz: 0.0,
                linewidth_repump_mhz: 0.0,
                linewidth_cavity_mhz: 0.0,
                ..ModelParams::default()
            },
            &space,
        )
        .unwrap();
        assert_eq!(with.len(), without.len() + 3);
    }
}
