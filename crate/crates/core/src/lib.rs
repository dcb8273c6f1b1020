//! Active-space reduced density matrices from a simulated qubit register,
//! cumulant reconstruction of the four-body matrix and strongly contracted
//! NEVPT2 energies.

pub mod chem;
pub mod cumulant;
pub mod ci;
pub mod error;
pub mod nevpt2;
pub mod rdm;
pub mod ops;
pub mod sim;
pub mod tensor;
pub mod vqe;
pub mod wick;

pub use chem::{ActiveHamiltonian, MOIntegrals, OrbitalSpaces};
pub use error::{Error, Result};
pub use ops::{PauliSum, PauliWord, SymmetryGroup};
pub use tensor::Tensor;
