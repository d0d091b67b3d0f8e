//! Exact and numerical verification of density results for sums of squares
//! in cyclic groups: residue-ring arithmetic, Gauss sums, additive counting,
//! an exact rational LP solver with certificates, the density-matrix LP
//! family, and prime-square majorants.

pub mod additive;
pub mod calibration;
pub mod charsums;
pub mod comblemma;
pub mod error;
pub mod exactlp;
pub mod majorants;
pub mod modring;

pub use error::{Error, Result};
pub use exactlp::{LpCertificate, LpProblem, LpSolution, LpStatus, Rational};
pub use modring::{factorize, squares_mod, ModulusFactorization, SquareKind, SquareSet};
