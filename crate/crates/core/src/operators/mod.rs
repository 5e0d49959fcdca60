//! Composite Hilbert space, sparse complex operators and Lindblad
//! superoperator assembly.

mod density;
mod space;
mod sparse;
mod superop;

pub use density::DensityMatrix;
pub use space::{annihilation, atomic_transfer, HilbertSpace, Mode};
pub use sparse::{tensor, SparseMatrix, C64};
pub use superop::{liouvillian, spost, spre};
