//! Stability of planar linear systems with randomly switched dynamics.
//!
//! The process `dX/dt = A_{I_t} X` is driven by a two-state Markov chain `I`
//! that leaves state `i` at rate `beta * lambda_i`. The crate computes the top
//! Lyapunov exponent `chi(beta)` by simulation and, for two explicit families,
//! by quadrature of the invariant density of the angular process.

pub mod angular;
pub mod certificates;
pub mod cli;
pub mod error;
pub mod exact;
pub mod pdmp;
pub mod planar;
pub mod products;
pub mod quad;
pub mod roots;

pub use error::{Error, Result};
pub use planar::{Mat2, Spectrum};
