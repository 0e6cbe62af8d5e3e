//! Scalar arithmetic shared by every stage of the pipeline.
//!
//! Coded computation only needs a handful of field operations, so the rest of
//! the crate is written against the [`Field`] trait. Two implementations ship:
//! [`PrimeField`] gives exact arithmetic in `F_p`; [`RealField`] and
//! [`DdField`] reuse the same formulas over `f64` and double-double reals
//! for the real-valued regression mode.

mod dd;
mod matrix;
mod poly;
mod prime;
mod real;

pub use dd::{Dd, DdField};
pub use matrix::Matrix;
pub use poly::{eval_many, interpolate, lagrange_basis, lagrange_weights, Poly};
pub use prime::{is_prime, Fp, PrimeField, MERSENNE_31, MERSENNE_61};
pub use real::RealField;

use core::fmt::Debug;

use rand::RngCore;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds 2^63")]
    ModulusTooLarge(u64),
    #[error("interpolation needs at least one point")]
    Empty,
    #[error("abscissa appears more than once")]
    DuplicateAbscissa,
    #[error("matrix dimensions do not agree")]
    Shape,
    #[error("matrix is singular")]
    Singular,
}

/// A field whose elements are small `Copy` values manipulated through a
/// context object (the modulus for prime fields).
pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Copy + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Embeds a non-negative integer (reduced mod p for prime fields).
    fn from_u64(&self, v: u64) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Result<Self::Elem, FieldError>;
    fn is_zero(&self, a: Self::Elem) -> bool;
    /// A uniformly random element (uniform over `F_p`; `[-1, 1)` for reals).
    fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// Number of elements, `None` when infinite.
    fn order(&self) -> Option<u64>;
    /// Pivot preference for elimination. Exact fields only care about zero.
    fn magnitude(&self, a: Self::Elem) -> f64;

    fn div(&self, a: Self::Elem, b: Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    fn pow(&self, mut base: Self::Elem, mut exp: u64) -> Self::Elem {
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn dot(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        a.iter()
            .zip(b)
            .fold(self.zero(), |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}
