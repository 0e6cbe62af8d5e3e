use rand::{Rng, RngCore};

use super::{Field, FieldError};

/// `f64` arithmetic behind the [`Field`] interface. Results are subject to
/// rounding, so decoding over this field is approximate.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RealField;

impl Field for RealField {
    type Elem = f64;

    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn from_u64(&self, v: u64) -> f64 {
        v as f64
    }
    fn add(&self, a: f64, b: f64) -> f64 {
        a + b
    }
    fn sub(&self, a: f64, b: f64) -> f64 {
        a - b
    }
    fn mul(&self, a: f64, b: f64) -> f64 {
        a * b
    }
    fn neg(&self, a: f64) -> f64 {
        -a
    }
    fn inv(&self, a: f64) -> Result<f64, FieldError> {
        if a == 0.0 {
            Err(FieldError::ZeroInverse)
        } else {
            Ok(1.0 / a)
        }
    }
    fn is_zero(&self, a: f64) -> bool {
        a == 0.0
    }
    fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        rng.gen_range(-1.0..1.0)
    }
    fn order(&self) -> Option<u64> {
        None
    }
    fn magnitude(&self, a: f64) -> f64 {
        libm::fabs(a)
    }
}
