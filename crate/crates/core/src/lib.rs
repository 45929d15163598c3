//! Synthesis and simulation toolkit for measuring single-particle spectral
//! functions through a system-environment coupling.
//!
//! The crate is organised in five layers:
//!
//! * [`circuit`]: the gate-level IR shared by everything else, plus its text
//!   format.
//! * [`fft`]: radix-2/3 fast fermionic Fourier transform (FFFT) synthesis and
//!   the interleave permutations it needs.
//! * [`czopt`]: greedy graph decimation for CZ circuits.
//! * [`sim`]: dense statevector, stabilizer tableau and free-fermion
//!   (single-particle) simulators used as mutually independent oracles.
//! * [`protocol`]: the environment-coupling protocol itself, its closed-form
//!   free-fermion results and the dynamical-correlation baseline.

pub mod circuit;
pub mod czopt;
mod error;
pub mod fft;
pub mod protocol;
pub mod sim;

pub use error::{Error, Result};
