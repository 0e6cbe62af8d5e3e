//! Fixed-point embedding of real data into `F_p`.
//!
//! A real `v` becomes `round(v * 2^bits)`, stored as its residue mod `p`.
//! Products pick up one factor of the scale per multiplication, so a value
//! of "power" `k` is read back by dividing by `scale^k`.

use alloc::vec::Vec;

use crate::field::{Fp, PrimeField, MERSENNE_61};

use super::RegressionError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantizationConfig {
    pub scale_bits: u32,
    pub modulus: u64,
}

impl Default for QuantizationConfig {
    fn default() -> Self {
        Self { scale_bits: 8, modulus: MERSENNE_61 }
    }
}

impl QuantizationConfig {
    pub fn scale(&self) -> f64 {
        libm::ldexp(1.0, self.scale_bits as i32)
    }

    pub fn scale_int(&self) -> i128 {
        1i128 << self.scale_bits
    }

    /// Largest magnitude a signed residue can carry unambiguously.
    pub fn guard(&self) -> u128 {
        (self.modulus / 2) as u128
    }

    pub fn field(&self) -> Result<PrimeField, RegressionError> {
        Ok(PrimeField::new(self.modulus)?)
    }

    pub fn quantize_value(&self, v: f64) -> Result<i64, RegressionError> {
        let q = libm::round(v * self.scale());
        if !q.is_finite() || libm::fabs(q) >= self.guard() as f64 {
            return Err(RegressionError::OverflowRisk { bound: libm::fabs(q), guard: self.guard() as f64 });
        }
        Ok(q as i64)
    }

    pub fn quantize(&self, v: &[f64]) -> Result<Vec<i64>, RegressionError> {
        v.iter().map(|&x| self.quantize_value(x)).collect()
    }

    pub fn dequantize_value(&self, v: i128, power: u32) -> f64 {
        libm::ldexp(v as f64, -((self.scale_bits * power) as i32))
    }

    pub fn dequantize(&self, v: &[i128], power: u32) -> Vec<f64> {
        v.iter().map(|&x| self.dequantize_value(x, power)).collect()
    }

    pub fn to_field(&self, field: &PrimeField, v: &[i64]) -> Vec<Fp> {
        v.iter().map(|&x| field.from_i128(x as i128)).collect()
    }
}

/// Data after quantization; `xq` row-major `m × d`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantizedProblem {
    pub xq: Vec<i64>,
    pub yq: Vec<i64>,
    pub m: usize,
    pub d: usize,
    pub config: QuantizationConfig,
}

impl QuantizedProblem {
    /// `2 (Xqᵀ Xq wq − s · Xqᵀ yq)`, exact, at power 3.
    pub fn gradient(&self, wq: &[i64]) -> Vec<i128> {
        let s = self.config.scale_int();
        let mut g = alloc::vec![0i128; self.d];
        for (row, &y) in self.xq.chunks(self.d).zip(&self.yq) {
            let xw: i128 = row.iter().zip(wq).map(|(&a, &b)| a as i128 * b as i128).sum();
            let resid = xw - s * y as i128;
            for (gi, &a) in g.iter_mut().zip(row) {
                *gi += a as i128 * resid;
            }
        }
        g.iter().map(|v| 2 * v).collect()
    }

    /// Upper bound on every coordinate of [`gradient`](Self::gradient) and of
    /// the decoded `Xqᵀ Xq wq`.
    pub fn magnitude_bound(&self, wq: &[i64]) -> u128 {
        let xmax = self.xq.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as u128;
        let ymax = self.yq.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as u128;
        let wmax = wq.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as u128;
        let (m, d) = (self.m as u128, self.d as u128);
        let s = self.config.scale_int() as u128;
        let quad = m.saturating_mul(d).saturating_mul(xmax).saturating_mul(xmax).saturating_mul(wmax);
        let lin = s.saturating_mul(m).saturating_mul(xmax).saturating_mul(ymax);
        quad.saturating_add(lin).saturating_mul(2)
    }

    pub fn check_overflow(&self, wq: &[i64]) -> Result<(), RegressionError> {
        let bound = self.magnitude_bound(wq);
        if bound >= self.config.guard() {
            return Err(RegressionError::OverflowRisk { bound: bound as f64, guard: self.config.guard() as f64 });
        }
        Ok(())
    }
}
