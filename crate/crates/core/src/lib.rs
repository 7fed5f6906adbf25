//! Zeta-regularized determinants of `-d^2/dx^2 + |x|^beta + alpha q(x)` on the
//! real line, computed from the Wronskian of the two recessive solutions and
//! checked against truncated eigenvalue products.

pub mod closedform;
pub mod determinant;
pub mod error;
pub mod ode;
pub mod oracle;
pub mod potential;
pub mod specfun;
pub mod validate;

pub use error::{Error, Result};
pub use determinant::{det_real_line, DetOptions, DeterminantResult, Method, Normalization, WronskianOptions};
pub use ode::{State, Tolerances};
pub use oracle::{OracleOptions, ProductEstimate, SpectrumEstimate};
pub use potential::{PerturbationSpec, PolyPiece, PotentialSpec, StepPiece};
pub use specfun::SpecialValue;
