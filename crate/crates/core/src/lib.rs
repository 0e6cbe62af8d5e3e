//! Lagrange coded computing.
//!
//! A dataset of `K` blocks is encoded into `N` shares by evaluating the
//! Lagrange interpolant of the blocks (plus `T` random padding blocks) at `N`
//! distinct points. Each worker applies a polynomial function `f` to its share
//! as if the data were uncoded; the master interpolates the composition
//! `f(u(z))` from the fastest returns, correcting up to `A` corrupted results,
//! and reads `f(X_i)` off at the original interpolation points.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! the command line or wall-clock time lives in the companion `lcc` crate.
//!
//! Module map:
//!
//! - [`field`]: prime-field, `f64` and double-double arithmetic, polynomials,
//!   small matrices
//! - [`functions`]: the computations workers run, with declared degrees
//! - [`scheme`]: feasibility, recovery thresholds, evaluation points
//! - [`codec`]: encoding matrix, random padding, share generation
//! - [`rsdecode`]: interpolation and Reed-Solomon style error correction
//! - [`privacy`]: MDS audit and exhaustive mutual-information check
//! - [`simulator`]: virtual-clock worker pool with fault injection
//! - [`regression`]: coded gradient descent for least squares
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod codec;
pub mod field;
pub mod functions;
pub mod privacy;
pub mod regression;
pub mod rsdecode;
pub mod scheme;
pub mod simulator;

pub use codec::{EncodingMatrix, RandomPad};
pub use field::{Dd, DdField, Field, Fp, PrimeField, RealField};
pub use functions::{Block, ComputationSpec};
pub use scheme::{EvalPoints, Feasibility, SchemeParams, Variant};
