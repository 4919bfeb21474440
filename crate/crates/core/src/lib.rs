//! Online packet scheduling with agreeable deadlines.
//!
//! Packets arrive over discrete steps, each with a weight and a window of
//! steps in which it can be sent; one packet goes out per step. This crate
//! holds the exact model, offline optima, the MG, MG′ and RG online
//! policies, simulation (deterministic, exact expectation, Monte Carlo) and
//! tools for measuring and searching competitive ratios.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod format;
pub mod model;
pub mod offline;
pub mod policies;
pub mod rational;

pub use error::{Error, Result};
pub use model::{Instance, Packet, PacketId, Schedule, Step};
pub use policies::Policy;
pub use rational::Rational;
