//! Core numerics for the two-oscillator noise experiment: the X-state family
//! driven by injected noise energy, the reservoir kernels that produce that
//! energy, and the correlation measures evaluated on the states.

pub mod error;
pub mod linalg;
pub mod measures;
pub mod noise;
pub mod state;
pub mod sweep;

pub use error::{Error, Result};
