//! Scattering, bound states and non-local PT correlation for complex
//! one-dimensional potentials, with the Scarf-II family as the closed-form
//! reference.
//!
//! Units: `hbar = 1`, `m = 1/2`, so the equation is `-psi'' + V psi = E psi`.

pub mod correlation;
pub mod exec;
pub mod potential;
pub mod scattering;
pub mod schrodinger;
pub mod specfun;
pub mod spectrum;

pub use num_complex::Complex64;

/// Complex scalar used throughout the public interface.
pub type ComplexValue = Complex64;

pub use exec::Execution;
pub use potential::{PotentialSpec, Scarf2, TabulatedPotential};
pub use scattering::{ScatteringMatrix, TransferMatrix};
pub use schrodinger::{Grid, Wavefunction};
