use core::fmt;

use rand::RngCore;

use super::{Field, FieldError};

/// 2^31 - 1, the default modulus. Products of two residues fit in a `u64`.
pub const MERSENNE_31: u64 = (1 << 31) - 1;
/// 2^61 - 1, used where fixed-point products need more headroom.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// A residue in `[0, p)`. Carries no modulus; arithmetic goes through
/// [`PrimeField`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Fp(u64);

impl Fp {
    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The prime field `F_p` for a prime `p < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= 1 << 63 {
            return Err(FieldError::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Wraps a value already known to be reduced.
    #[inline]
    pub fn elem(&self, v: u64) -> Fp {
        debug_assert!(v < self.p);
        Fp(v)
    }

    /// Maps a signed integer to its residue.
    pub fn from_i128(&self, v: i128) -> Fp {
        Fp(v.rem_euclid(self.p as i128) as u64)
    }

    /// Representative in `(-p/2, p/2]`.
    pub fn to_signed(&self, a: Fp) -> i64 {
        if a.0 > self.p / 2 {
            a.0 as i64 - self.p as i64
        } else {
            a.0 as i64
        }
    }

    /// Bit length of `p - 1`, the mask width used for rejection sampling.
    fn sample_bits(&self) -> u32 {
        64 - (self.p - 1).leading_zeros()
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self { p: MERSENNE_31 }
    }
}

impl Field for PrimeField {
    type Elem = Fp;

    #[inline]
    fn zero(&self) -> Fp {
        Fp(0)
    }

    #[inline]
    fn one(&self) -> Fp {
        Fp(1 % self.p)
    }

    #[inline]
    fn from_u64(&self, v: u64) -> Fp {
        Fp(v % self.p)
    }

    #[inline]
    fn add(&self, a: Fp, b: Fp) -> Fp {
        let s = a.0 + b.0;
        Fp(if s >= self.p { s - self.p } else { s })
    }

    #[inline]
    fn sub(&self, a: Fp, b: Fp) -> Fp {
        Fp(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + self.p - b.0 })
    }

    #[inline]
    fn mul(&self, a: Fp, b: Fp) -> Fp {
        if self.p <= u32::MAX as u64 + 1 {
            Fp(a.0 * b.0 % self.p)
        } else {
            Fp((a.0 as u128 * b.0 as u128 % self.p as u128) as u64)
        }
    }

    #[inline]
    fn neg(&self, a: Fp) -> Fp {
        if a.0 == 0 {
            a
        } else {
            Fp(self.p - a.0)
        }
    }

    fn inv(&self, a: Fp) -> Result<Fp, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::ZeroInverse);
        }
        // extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.p as i128, a.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.from_i128(t0))
    }

    #[inline]
    fn is_zero(&self, a: Fp) -> bool {
        a.0 == 0
    }

    fn random<R: RngCore + ?Sized>(&self, rng: &mut R) -> Fp {
        let bits = self.sample_bits();
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        loop {
            let v = rng.next_u64() & mask;
            if v < self.p {
                return Fp(v);
            }
        }
    }

    fn order(&self) -> Option<u64> {
        Some(self.p)
    }

    #[inline]
    fn magnitude(&self, a: Fp) -> f64 {
        if a.0 == 0 {
            0.0
        } else {
            1.0
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the first twelve prime bases are exact for
/// every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f11() -> PrimeField {
        PrimeField::new(11).unwrap()
    }

    #[test]
    fn inverse_examples() {
        let f = f11();
        assert_eq!(f.inv(f.elem(1)).unwrap(), f.elem(1));
        assert_eq!(f.inv(f.elem(10)).unwrap(), f.elem(10));
        assert_eq!(f.inv(f.elem(0)), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn inverse_matches_exhaustive_search() {
        let f = f11();
        for a in 1..11 {
            let brute = (1..11).find(|b| a * b % 11 == 1).unwrap();
            assert_eq!(f.inv(f.elem(a)).unwrap().value(), brute);
        }
    }

    #[test]
    fn rejects_composites_and_huge_moduli() {
        assert_eq!(PrimeField::new(12), Err(FieldError::NotPrime(12)));
        assert_eq!(PrimeField::new(1), Err(FieldError::NotPrime(1)));
        assert!(matches!(PrimeField::new(u64::MAX), Err(FieldError::ModulusTooLarge(_))));
        assert!(PrimeField::new(MERSENNE_31).is_ok());
        assert!(PrimeField::new(MERSENNE_61).is_ok());
    }

    #[test]
    fn primality_agrees_with_trial_division() {
        let trial = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        for n in 0..5000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        // strong pseudoprime to bases 2..=37 product region
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn signed_round_trip() {
        let f = f11();
        for v in -5i128..=5 {
            assert_eq!(f.to_signed(f.from_i128(v)) as i128, v);
        }
    }

    proptest! {
        #[test]
        fn axioms_hold(p in prop::sample::select(vec![11u64, 127, MERSENNE_31, MERSENNE_61]),
                       a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let f = PrimeField::new(p).unwrap();
            let (a, b, c) = (f.from_u64(a), f.from_u64(b), f.from_u64(c));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
            prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
            if !f.is_zero(a) {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
        }
    }
}
