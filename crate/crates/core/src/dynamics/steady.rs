use std::time::Instant;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{DomainError, NumericalError, Result};
use crate::operators::{DensityMatrix, SparseMatrix, C64};

/// Controls for [`steady_state_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateOptions {
    /// Largest accepted ‖L·vec(ρ)‖₂.
    pub tolerance: f64,
    pub refinement_steps: usize,
    /// Condition estimate above which the constrained system is declared
    /// singular.
    pub max_condition: f64,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        SteadyStateOptions {
            tolerance: 1e-10,
            refinement_steps: 3,
            max_condition: 1e13,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateSolution {
    pub rho: DensityMatrix,
    /// ‖L·vec(ρ)‖₂ of the returned (Hermitized, normalized) state.
    pub residual_norm: f64,
    /// Wall-clock seconds spent factorizing and solving.
    pub solve_time: f64,
}

/// Steady state of the Liouvillian `l` with default options.
pub fn steady_state(l: &SparseMatrix) -> Result<SteadyStateSolution> {
    steady_state_with(l, SteadyStateOptions::default())
}

/// Solves L·vec(ρ) = 0 with tr ρ = 1 imposed by replacing the first row of
/// L with the trace functional.
///
/// A steady-state manifold of dimension above one makes the constrained
/// system singular; that is reported as
/// [`NumericalError::SingularSteadyState`] rather than returning one
/// arbitrary member.
pub fn steady_state_with(
    l: &SparseMatrix,
    options: SteadyStateOptions,
) -> Result<SteadyStateSolution> {
    let start = Instant::now();
    let n = l.rows();
    let d = (n as f64).sqrt().round() as usize;
    if d == 0 || d * d != n || !l.is_square() {
        return Err(DomainError::DimensionMismatch {
            expected: d * d,
            got: n,
        }
        .into());
    }

    let scale = l.max_abs().max(1.0);
    let trace_row = (0..d).map(|k| (0, k * (d + 1), C64::new(scale, 0.0)));
    let kept = l.iter().filter(|&(r, _, _)| r != 0);
    let a = SparseMatrix::from_triplets(n, n, trace_row.chain(kept));

    let triplets: Vec<_> = a.iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let csc = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &triplets).map_err(|e| {
        NumericalError::SingularSteadyState(format!("matrix assembly failed: {e:?}"))
    })?;
    let lu = csc.sp_lu().map_err(|e| {
        NumericalError::SingularSteadyState(format!("LU factorization failed: {e:?}"))
    })?;

    let solve = |rhs: &[C64]| -> Vec<C64> {
        let mut m = Mat::<C64>::from_fn(n, 1, |i, _| rhs[i]);
        lu.solve_in_place(m.as_mut());
        (0..n).map(|i| m[(i, 0)]).collect()
    };

    // Inverse iteration on a fixed pseudo-random vector estimates ‖A⁻¹‖;
    // a near-zero pivot shows up as enormous growth.
    let probe: Vec<C64> = (0..n)
        .map(|i| {
            let t = (i as f64 + 1.0) * 0.618_033_988_749_895;
            C64::new((t - t.floor()) - 0.5, ((1.7 * t).sin()) * 0.5)
        })
        .collect();
    let mut z = solve(&probe);
    let growth1 = norm(&z) / norm(&probe);
    let zn = norm(&z);
    if zn.is_finite() && zn > 0.0 {
        z.iter_mut().for_each(|x| *x /= zn);
    }
    let growth2 = norm(&solve(&z));
    let condition = a.max_abs() * growth1.max(growth2);
    if !condition.is_finite() || condition > options.max_condition {
        return Err(NumericalError::SingularSteadyState(format!(
            "condition estimate {condition:.3e} exceeds {:.1e}",
            options.max_condition
        ))
        .into());
    }

    let mut b = vec![C64::new(0.0, 0.0); n];
    b[0] = C64::new(scale, 0.0);
    let mut x = solve(&b);
    for _ in 0..options.refinement_steps {
        let ax = a.matvec(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let dx = solve(&r);
        x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
    }
    // A physical ρ has Frobenius norm at most one.
    let xn = norm(&x);
    if !xn.is_finite() || xn > 1e3 {
        return Err(NumericalError::SingularSteadyState(format!("solution norm {xn:.3e}")).into());
    }

    let rho = DensityMatrix::from_vec(&x)?.hermitized_normalized();
    let residual_norm = norm(&l.matvec(&rho.to_vec()));
    if residual_norm.is_nan() || residual_norm > options.tolerance {
        return Err(NumericalError::ResidualTooLarge {
            residual: residual_norm,
            tolerance: options.tolerance,
        }
        .into());
    }
    Ok(SteadyStateSolution {
        rho,
        residual_norm,
        solve_time: start.elapsed().as_secs_f64(),
    })
}

pub(crate) fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::operators::{annihilation, liouvillian};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Driven two-level atom: H = -Δ|e⟩⟨e| + (Ω/2)(|e⟩⟨g| + h.c.), C = √Γ |g⟩⟨e|.
    fn two_level(omega: f64, delta: f64, gamma: f64) -> SparseMatrix {
        let h = SparseMatrix::from_triplets(
            2,
            2,
            [
                (1, 1, c(-delta, 0.0)),
                (0, 1, c(omega / 2.0, 0.0)),
                (1, 0, c(omega / 2.0, 0.0)),
            ],
        );
        let lower = SparseMatrix::from_triplets(2, 2, [(0, 1, c(gamma.sqrt(), 0.0))]);
        liouvillian(&h, &[lower]).unwrap()
    }

    #[test]
    fn empty_decaying_cavity_relaxes_to_vacuum() {
        let a = annihilation(3).unwrap();
        let l = liouvillian(&SparseMatrix::zeros(4, 4), &[a.scale_real(0.8)]).unwrap();
        let sol = steady_state(&l).unwrap();
        assert!(sol.residual_norm < 1e-12);
        assert!((sol.rho.population(0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_level_bloch_population() {
        for &(omega, delta, gamma) in &[(1.0, 0.0, 1.0), (3.0, -2.0, 0.5), (10.0, 7.0, 2.0)] {
            let sol = steady_state(&two_level(omega, delta, gamma)).unwrap();
            let expected =
                (omega * omega / 4.0) / (delta * delta + gamma * gamma / 4.0 + omega * omega / 2.0);
            assert!((sol.rho.population(1) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_kernel_is_an_error() {
        // Two uncoupled decaying qubits sharing nothing: any mixture of the
        // two ground states is stationary.
        let lower = SparseMatrix::from_triplets(3, 3, [(0, 2, c(1.0, 0.0))]);
        let l = liouvillian(&SparseMatrix::zeros(3, 3), &[lower]).unwrap();
        match steady_state(&l) {
            Err(Error::Numerical(NumericalError::SingularSteadyState(_))) => {}
            other => panic!("expected singular error, got {other:?}"),
        }
        // The zero Liouvillian is structurally singular.
        let zero = SparseMatrix::zeros(4, 4);
        assert!(steady_state(&zero).is_err());
    }

    #[test]
    fn rejects_non_square_dimension() {
        assert!(steady_state(&SparseMatrix::zeros(5, 5)).is_err());
    }
}
