//! Constructive entropy-number machinery on finite-dimensional spaces:
//! greedy sparse approximation in smooth norms, explicit covers and packings
//! for octahedra and l_p balls, A-norm/U-norm duality, and the Nikol'skii
//! discretization pipeline.

pub mod discretization;
pub mod entropy;
pub mod error;
pub mod fit;
pub mod greedy;
pub mod harness;
pub mod lp;
pub mod par;
pub mod sampling;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
pub use spaces::{estimate_modulus, modulus_profile, Dictionary, DualFunctional, NormKind, NormedSpaceSpec};
