//! Hybrid qubit–qumode circuit simulation over truncated Fock spaces.
//!
//! Each qumode is encoded in binary on `k` qubit wires (cutoff `2^k`).
//! Global basis indices are little-endian: wire 0 is the least-significant
//! bit, qumode wires come first and qubit wires after them.

pub mod circuit;
pub mod cli;
pub mod engine;
pub mod error;
pub mod fock;
pub mod hamiltonians;
pub mod linalg;
pub mod wigner;

pub use error::{Error, Result};
