//! Numerical laboratory for Dirichlet series satisfying Hecke-type functional
//! equations with multiple Gamma factors.
//!
//! The crate evaluates the inverse-Mellin kernels `Z`, `Y`, `X` on vertical
//! lines, computes residual functions by small-circle residue quadrature, and
//! assembles both sides of the modular relation, the auxiliary modular
//! relation, the Riesz-sum identity and the functional-equation
//! reconstruction, reporting the residual of each at configurable tolerance.

pub mod catalog;
pub mod config;
pub mod error;
pub mod fe;
pub mod gamma;
pub mod identities;
pub mod kernels;
pub mod numeric;
pub mod quadrature;
pub mod residues;
pub mod series;
pub mod zeta;

pub use error::{Error, Result};
pub use fe::FunctionalEquationData;
pub use gamma::{GammaSignature, ScaledComplex};
pub use identities::IdentityReport;
pub use kernels::{ContourSpec, KernelKind};
pub use numeric::{Cplx, Real};
