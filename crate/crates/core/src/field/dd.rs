//! Double-double reals: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! about 106 bits of significand. Built from the error-free transformations
//! `two_sum` and `two_prod` (the latter via fused multiply-add).

use rand::{Rng, RngCore};

use super::{Field, FieldError};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Requires `|a| >= |b|` or `a == 0`.
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    /// Nearest `f64`.
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn norm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::norm(s, e + f)
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::norm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        Dd::norm(p, e + self.lo * b)
    }

    /// Long division with two correction steps.
    pub fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self.sub(b.mul_f64(q1));
        let q2 = r.hi / b.hi;
        let r = r.sub(b.mul_f64(q2));
        let q3 = r.hi / b.hi;
        Dd::norm(q1, q2).add(Dd::from_f64(q3))
    }
}

/// [`Dd`] arithmetic behind the [`Field`] interface.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DdField;

impl DdField {
    /// Unit roundoff, `2^-104`.
    pub const UNIT: f64 = f64::EPSILON * f64::EPSILON;
}

impl Field for DdField {
    type Elem = Dd;

    fn zero(&self) -> Dd {
        Dd::ZERO
    }
    fn one(&self) -> Dd {
        Dd::from_f64(1.0)
    }
    fn from_u64(&self, v: u64) -> Dd {
        let hi = v as f64;
        // hi may have rounded; the remainder is exact in i128
        Dd::norm(hi, (v as i128 - hi as i128) as f64)
    }
    fn add(&self, a: Dd, b: Dd) -> Dd {
        a.add(b)
    }
    fn sub(&self, a: Dd, b: Dd) -> Dd {
        a.sub(b)
    }
    fn mul(&self, a: Dd, b: Dd) -> Dd {
        a.mul(b)
    }
    fn neg(&self, a: Dd) -> Dd {
        a.neg()
    }
    fn inv(&self, a: Dd) -> Result<Dd, FieldError> {
        if a.hi == 0.0 {
            Err(FieldError::ZeroInverse)
        } else {
            Ok(self.one().div(a))
        }
    }
    fn div(&self, a: Dd, b: Dd) -> Result<Dd, FieldError> {
        if b.hi == 0.0 {
            Err(FieldError::ZeroInverse)
        } else {
            Ok(a.div(b))
        }
    }
    fn is_zero(&self, a: Dd) -> bool {
        a.hi == 0.0
    }
    fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> Dd {
        Dd::from_f64(rng.gen_range(-1.0..1.0))
    }
    fn order(&self) -> Option<u64> {
        None
    }
    fn magnitude(&self, a: Dd) -> f64 {
        libm::fabs(a.hi)
    }
}
