//! State-vector simulation of quantum phase estimation for Hamiltonian
//! eigenvalues and eigenvectors.
//!
//! The pipeline prepares `|0>_index |V_a>_system`, spreads the index register
//! into a uniform superposition, applies `U^j` conditioned on index value `j`,
//! reads the eigenphases out with an inverse QFT, and measures. `U` is either
//! an explicit unitary or `e^{-iHt}` for a local Hamiltonian, in which case it
//! can be built by first-order Trotterization.

pub mod error;
pub mod gate;
pub mod hamiltonian;
pub mod layout;
pub mod oracle;
pub mod phase_estimation;
pub mod problems;
pub mod qft;
pub mod rng;
pub mod statevector;

pub use error::{QpeError, Result};
pub use gate::{CMatrix, GateMatrix};
pub use hamiltonian::{EvolutionParams, HamiltonianSum, LocalTerm};
pub use layout::RegisterLayout;
pub use oracle::{SpectralComponent, SpectralDecomposition};
pub use phase_estimation::{
    EigenResult, Histogram, Peak, PhaseEstimationConfig, PhaseSample, PowerMethod, Readout,
    UnitarySource,
};
pub use statevector::{MeasurementOutcome, StateVector};

pub use num_complex::Complex64;
