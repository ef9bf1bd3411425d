//! Simulation of double-STIRAP geometric phase gates on neutral atoms.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod atom;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod gate;
pub mod grover;
pub mod hamiltonian;
pub mod numerics;
pub mod pulse;

pub use error::{Error, Result};
