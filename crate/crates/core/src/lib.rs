//! Numerical toolkit for the so(4,2) dynamical algebra of the hydrogen atom.
//!
//! * [`algebra`]: exact structure constants, Jacobi checks, bracket closure.
//! * [`classical`]: phase-space realizations for both energy signs and
//!   finite-difference Poisson-bracket verification.
//! * [`representation`]: truncated bound-state matrix representation on
//!   `|n l m⟩`, derived ladder coefficients, commutator and Casimir checks.
//! * [`controllability`]: Lie-rank and orbit-dimension checks for the
//!   bilinear control system built from the generators.
//! * [`simulator`]: exact rotating-frame propagation under piecewise-constant
//!   controls and a small pulse optimizer.
//! * [`cli`]: the `so42` command-line front end.

pub mod algebra;
pub mod classical;
pub mod cli;
pub mod controllability;
pub mod error;
pub mod linalg;
pub mod representation;
pub mod simulator;

pub use algebra::{AlgebraElement, Family, GeneratorId, StructureTable};
pub use error::{Error, Result};
