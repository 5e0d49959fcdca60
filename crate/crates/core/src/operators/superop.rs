//! Superoperators acting on column-stacked density matrices.
//!
//! With vec(ρ) stacking columns, vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ), so
//! spre(A) = I ⊗ A and spost(B) = Bᵀ ⊗ I.

use super::sparse::{SparseMatrix, C64};
use crate::error::DomainError;

/// Left multiplication ρ ↦ A ρ.
pub fn spre(a: &SparseMatrix) -> SparseMatrix {
    SparseMatrix::identity(a.rows()).kron(a)
}

/// Right multiplication ρ ↦ ρ B.
pub fn spost(b: &SparseMatrix) -> SparseMatrix {
    b.transpose().kron(&SparseMatrix::identity(b.rows()))
}

/// Lindblad generator L(ρ) = -i[H, ρ] + Σ_k (C_k ρ C_k† - ½{C_k† C_k, ρ}).
///
/// Rejects a non-Hermitian `h` (tolerance 1e-10 relative to its largest
/// entry) and operators whose dimensions disagree.
pub fn liouvillian(
    h: &SparseMatrix,
    collapse: &[SparseMatrix],
) -> Result<SparseMatrix, DomainError> {
    let d = h.rows();
    h.ensure_square(d)?;
    for c in collapse {
        c.ensure_square(d)?;
    }
    let herm = h.hermiticity_error();
    if herm > 1e-10 * h.max_abs().max(1.0) {
        return Err(DomainError::NotHermitian(herm));
    }

    let i = C64::new(0.0, 1.0);
    let mut triplets: Vec<(usize, usize, C64)> = Vec::new();
    // -i (I⊗H - Hᵀ⊗I)
    let push_pre_post = |m: &SparseMatrix, pre: C64, post: C64, out: &mut Vec<_>| {
        for (r, c, v) in m.iter() {
            for k in 0..d {
                out.push((k * d + r, k * d + c, pre * v));
                out.push((c * d + k, r * d + k, post * v));
            }
        }
    };
    push_pre_post(h, -i, i, &mut triplets);

    let half = C64::new(-0.5, 0.0);
    for c in collapse {
        // C̄ ⊗ C
        for (r1, c1, v1) in c.iter() {
            for (r2, c2, v2) in c.iter() {
                triplets.push((r1 * d + r2, c1 * d + c2, v1.conj() * v2));
            }
        }
        let cdc = c.adjoint().matmul(c);
        push_pre_post(&cdc, half, half, &mut triplets);
    }
    Ok(SparseMatrix::from_triplets(d * d, d * d, triplets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{annihilation, DensityMatrix};
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(seed: &[f64], d: usize) -> DMatrix<C64> {
        let m = DMatrix::from_fn(d, d, |i, j| {
            let k = (i * d + j) % seed.len();
            c(seed[k], seed[(k + 3) % seed.len()])
        });
        (&m + m.adjoint()) * c(0.5, 0.0)
    }

    /// Applies the Lindblad equation directly to a dense ρ.
    fn dense_lindblad(h: &DMatrix<C64>, cs: &[DMatrix<C64>], rho: &DMatrix<C64>) -> DMatrix<C64> {
        let i = c(0.0, 1.0);
        let mut out = (h * rho - rho * h) * (-i);
        for cm in cs {
            let cd = cm.adjoint();
            let cdc = &cd * cm;
            out += cm * rho * &cd - (&cdc * rho + rho * &cdc) * c(0.5, 0.0);
        }
        out
    }

    fn apply(l: &SparseMatrix, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let v = l.matvec(rho.as_slice());
        DMatrix::from_column_slice(rho.nrows(), rho.ncols(), &v)
    }

    fn test_system(seed: &[f64], d: usize) -> (SparseMatrix, Vec<SparseMatrix>) {
        let h = SparseMatrix::from_dense(&random_hermitian(seed, d));
        let c1 = SparseMatrix::from_dense(&DMatrix::from_fn(d, d, |i, j| {
            if j == i + 1 {
                c(seed[i % seed.len()].abs() + 0.1, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }));
        let c2 = SparseMatrix::from_dense(&DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                c(0.3 * i as f64, 0.1)
            } else {
                c(0.0, 0.0)
            }
        }));
        (h, vec![c1, c2])
    }

    #[test]
    fn pre_post_conventions() {
        let a =
            SparseMatrix::from_dense(&DMatrix::from_fn(3, 3, |i, j| c(i as f64 + 1.0, j as f64)));
        let b =
            SparseMatrix::from_dense(&DMatrix::from_fn(3, 3, |i, j| c(j as f64 - i as f64, 1.0)));
        let rho = random_hermitian(&[0.3, -1.2, 0.7, 2.0, -0.4], 3);
        let lhs = apply(&spre(&a).matmul(&spost(&b)), &rho);
        let rhs = a.to_dense() * &rho * b.to_dense();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn decaying_cavity_kernel_is_vacuum() {
        let a = annihilation(1).unwrap();
        let kappa = 0.3;
        let h = SparseMatrix::zeros(2, 2);
        let l = liouvillian(&h, &[a.scale_real((2.0_f64 * kappa).sqrt())]).unwrap();
        let vac = DensityMatrix::basis_state(2, 0);
        assert!(l.matvec(&vac.to_vec()).iter().all(|z| z.norm() < 1e-15));
        // The excited population is not stationary.
        let one = DensityMatrix::basis_state(2, 1);
        assert!(l.matvec(&one.to_vec())[3].re < 0.0);
    }

    #[test]
    fn rejects_non_hermitian_and_mismatched() {
        let h = SparseMatrix::from_triplets(2, 2, [(0, 1, c(1.0, 0.0))]);
        assert!(matches!(
            liouvillian(&h, &[]),
            Err(DomainError::NotHermitian(_))
        ));
        let h = SparseMatrix::identity(2);
        assert!(liouvillian(&h, &[SparseMatrix::identity(3)]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn trace_and_hermiticity_preserved(seed in proptest::collection::vec(-1.0f64..1.0, 7..20),
                                           rho_seed in proptest::collection::vec(-1.0f64..1.0, 5..15)) {
            let d = 5;
            let (h, cs) = test_system(&seed, d);
            let l = liouvillian(&h, &cs).unwrap();
            let rho = random_hermitian(&rho_seed, d);
            let out = apply(&l, &rho);
            prop_assert!(out.trace().norm() < 1e-12 * rho.norm().max(1.0));
            prop_assert!((&out - out.adjoint()).camax() < 1e-12);
            let dense: Vec<_> = cs.iter().map(|m| m.to_dense()).collect();
            let oracle = dense_lindblad(&h.to_dense(), &dense, &rho);
            prop_assert!((out - oracle).camax() < 1e-12);
        }
    }

    #[test]
    fn superoperator_matches_pre_post_assembly() {
        let (h, cs) = test_system(&[0.4, -0.9, 0.25, 0.6, -0.1, 0.8, -0.7], 4);
        let i = c(0.0, 1.0);
        let mut expected = spre(&h).sub(&spost(&h)).scale(-i);
        for cm in &cs {
            let cd = cm.adjoint();
            let cdc = cd.matmul(cm);
            expected = expected
                .add(&spre(cm).matmul(&spost(&cd)))
                .sub(&spre(&cdc).scale_real(0.5))
                .sub(&spost(&cdc).scale_real(0.5));
        }
        let l = liouvillian(&h, &cs).unwrap();
        assert!((l.to_dense() - expected.to_dense()).camax() < 1e-12);
    }
}
