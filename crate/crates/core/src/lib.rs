//! Finite Weil representation of SL2(F_p), the Heisenberg representation of
//! the quantum torus at Planck constant `1/p`, and the Hecke-torus
//! exponential sums they produce.

pub mod canonical;
pub mod cli;
pub mod error;
pub mod field;
pub mod group;
pub mod hecke;
pub mod report;
pub mod stats;
pub mod weil;

pub use error::{Error, Result};
pub use field::{PrimeContext, Scalar};
pub use group::{
    hecke_torus, HeisenbergElement, IntegralSL2, LatticeVector, PlaneVector, SL2Element,
    TorusCharacter, TorusDescriptor,
};
pub use report::{IdentityReport, Sampling};
pub use weil::ComplexMatrix;
