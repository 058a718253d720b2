//! Global-entanglement dynamics of GHZ and W registers under local
//! dissipative, dephasing and depolarizing noise.
//!
//! Three independent routes produce every curve: analytic formulas
//! ([`closed_form`]), exact Kraus evolution followed by concurrence or
//! N-concurrence ([`channels`] + [`measures`]), and RK4 integration of the
//! master equation ([`integrator`]). [`runner`] sweeps, fits and writes CSV.

pub mod channels;
pub mod closed_form;
pub mod error;
pub mod integrator;
pub mod measures;
pub mod qmatrix;
pub mod random;
pub mod runner;
pub mod states;

pub use error::{Error, Result};
