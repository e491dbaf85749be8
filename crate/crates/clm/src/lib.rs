//! Exact distributions of cokernel types of random symplectic similitude
//! matrices over Z/l^rho, together with the Cohen-Lenstra style limit
//! measures they converge to.
//!
//! The crate has two halves that check each other:
//!
//! * the *analytic* side (`groups`, `counting`, `qseries`, `interval`,
//!   `distributions`) evaluates the limit measures exactly as rationals
//!   plus certified interval tails;
//! * the *matrix* side (`symp`) enumerates or samples actual similitude
//!   matrices over Z/l^rho and tabulates empirical cokernel statistics.
//!
//! `lattice` holds slow brute-force oracles used to validate the closed
//! formulas, and `report` serializes tables for the CLI.

pub mod counting;
pub mod distributions;
pub mod error;
pub mod groups;
pub mod interval;
pub mod lattice;
pub mod qseries;
pub mod report;
pub mod symp;
pub mod verify;

pub use error::{ClmError, Result};
pub use groups::GroupType;
