//! Degrees-of-freedom analysis for the two-user MIMO broadcast channel in which
//! only the first `k` of `M` transmit antennas hold perfect channel knowledge.
//!
//! The crate is organised bottom-up: exact arithmetic ([`field`], [`rational`],
//! [`linalg`]), closed-form bounds and regions ([`dof`]), channel sampling
//! ([`channel`]), precoders ([`precoding`]), linear transmission plans
//! ([`schemes`]) and their certification ([`verifier`]).

pub mod channel;
pub mod dof;
pub mod error;
pub mod field;
pub mod linalg;
pub mod precoding;
pub mod rational;
pub mod schemes;
pub mod verifier;

pub use error::{Error, Result};
pub use rational::Rational;
