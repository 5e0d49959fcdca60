use serde::{Deserialize, Serialize};

use super::sparse::{SparseMatrix, C64};
use crate::atomic::{AtomicLevel, Manifold};
use crate::error::DomainError;

/// Cavity polarization mode index within a [`HilbertSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    H = 0,
    V = 1,
}

impl Mode {
    pub const BOTH: [Mode; 2] = [Mode::H, Mode::V];
}

/// Atom ⊗ cavity-mode product space with truncated Fock bases.
///
/// Basis ordering is atom-major: atom ⊗ mode 0 ⊗ mode 1 ⊗ ...
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    n_max: Vec<usize>,
}

impl HilbertSpace {
    pub const ATOM_DIM: usize = AtomicLevel::COUNT;

    pub fn new(n_max: Vec<usize>) -> Result<Self, DomainError> {
        if let Some(&bad) = n_max.iter().find(|&&n| n < 1) {
            return Err(DomainError::InvalidTruncation(bad));
        }
        Ok(HilbertSpace { n_max })
    }

    /// Atom with H and V cavity modes, both truncated at `n_max` photons.
    pub fn two_mode(n_max: usize) -> Result<Self, DomainError> {
        Self::new(vec![n_max, n_max])
    }

    pub fn mode_count(&self) -> usize {
        self.n_max.len()
    }

    pub fn n_max(&self, mode: usize) -> usize {
        self.n_max[mode]
    }

    fn cavity_dim(&self) -> usize {
        self.n_max.iter().map(|n| n + 1).product()
    }

    pub fn total_dim(&self) -> usize {
        Self::ATOM_DIM * self.cavity_dim()
    }

    /// Basis index of |level⟩ ⊗ |n_0, n_1, ...⟩.
    pub fn index(&self, level: AtomicLevel, photons: &[usize]) -> usize {
        assert_eq!(photons.len(), self.n_max.len());
        let mut idx = level.index();
        for (n, &nm) in photons.iter().zip(&self.n_max) {
            assert!(*n <= nm, "photon number {n} above truncation {nm}");
            idx = idx * (nm + 1) + n;
        }
        idx
    }

    /// Decomposes a basis index into (atomic level index, photon numbers).
    pub fn decompose(&self, mut idx: usize) -> (usize, Vec<usize>) {
        let mut photons = vec![0; self.n_max.len()];
        for (slot, &nm) in photons.iter_mut().zip(&self.n_max).rev() {
            *slot = idx % (nm + 1);
            idx /= nm + 1;
        }
        (idx, photons)
    }

    /// Embeds a single-factor operator; `factor` 0 is the atom, 1.. the modes.
    fn embed(&self, factor: usize, op: &SparseMatrix) -> SparseMatrix {
        let mut dims = vec![Self::ATOM_DIM];
        dims.extend(self.n_max.iter().map(|n| n + 1));
        dims.iter()
            .enumerate()
            .map(|(k, &d)| {
                if k == factor {
                    op.clone()
                } else {
                    SparseMatrix::identity(d)
                }
            })
            .reduce(|acc, m| acc.kron(&m))
            .expect("at least the atomic factor")
    }

    /// Photon annihilation operator of one mode on the full space.
    pub fn annihilation(&self, mode: usize) -> SparseMatrix {
        let a = annihilation(self.n_max[mode]).expect("truncation validated at construction");
        self.embed(mode + 1, &a)
    }

    /// a†a of one mode.
    pub fn number(&self, mode: usize) -> SparseMatrix {
        let a = self.annihilation(mode);
        a.adjoint().matmul(&a)
    }

    /// Total photon number summed over modes.
    pub fn total_number(&self) -> SparseMatrix {
        (0..self.mode_count())
            .map(|m| self.number(m))
            .reduce(|a, b| a.add(&b))
            .unwrap_or_else(|| SparseMatrix::zeros(self.total_dim(), self.total_dim()))
    }

    /// |to⟩⟨from| on the atom, identity on the cavity.
    pub fn atomic_transfer(&self, from: AtomicLevel, to: AtomicLevel) -> SparseMatrix {
        atomic_transfer(from, to, self)
    }

    /// Projector onto one fine-structure manifold.
    pub fn manifold_projector(&self, manifold: Manifold) -> SparseMatrix {
        let diag: Vec<C64> = AtomicLevel::ALL
            .iter()
            .map(|l| C64::new(if l.manifold() == manifold { 1.0 } else { 0.0 }, 0.0))
            .collect();
        self.embed(0, &SparseMatrix::from_diagonal(&diag))
    }

    /// Projector onto the highest retained Fock state of one mode.
    pub fn top_fock_projector(&self, mode: usize) -> SparseMatrix {
        let nm = self.n_max[mode];
        let diag: Vec<C64> = (0..=nm)
            .map(|n| C64::new(if n == nm { 1.0 } else { 0.0 }, 0.0))
            .collect();
        self.embed(mode + 1, &SparseMatrix::from_diagonal(&diag))
    }
}

/// Truncated annihilation operator with ⟨n-1|a|n⟩ = √n.
pub fn annihilation(n_max: usize) -> Result<SparseMatrix, DomainError> {
    if n_max < 1 {
        return Err(DomainError::InvalidTruncation(n_max));
    }
    Ok(SparseMatrix::from_triplets(
        n_max + 1,
        n_max + 1,
        (1..=n_max).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))),
    ))
}

/// |to⟩⟨from| embedded in the full space.
pub fn atomic_transfer(from: AtomicLevel, to: AtomicLevel, space: &HilbertSpace) -> SparseMatrix {
    let op = SparseMatrix::from_triplets(
        HilbertSpace::ATOM_DIM,
        HilbertSpace::ATOM_DIM,
        [(to.index(), from.index(), C64::new(1.0, 0.0))],
    );
    space.embed(0, &op)
}
