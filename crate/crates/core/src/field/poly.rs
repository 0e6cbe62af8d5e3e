use alloc::vec;
use alloc::vec::Vec;

use super::{Field, FieldError};

/// Dense univariate polynomial, lowest degree first. The zero polynomial has
/// no coefficients, and the leading coefficient is otherwise nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E: Copy + PartialEq> Poly<E> {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn from_coeffs<F: Field<Elem = E>>(field: &F, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().is_some_and(|&c| field.is_zero(c)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant<F: Field<Elem = E>>(field: &F, c: E) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    /// The monic linear factor `z - root`.
    pub fn linear<F: Field<Elem = E>>(field: &F, root: E) -> Self {
        Self::from_coeffs(field, vec![field.neg(root), field.one()])
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval<F: Field<Elem = E>>(&self, field: &F, x: E) -> E {
        self.coeffs
            .iter()
            .rev()
            .fold(field.zero(), |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn add<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).copied().unwrap_or(field.zero());
        let coeffs = (0..n).map(|i| field.add(get(self, i), get(other, i))).collect();
        Self::from_coeffs(field, coeffs)
    }

    pub fn scale<F: Field<Elem = E>>(&self, field: &F, s: E) -> Self {
        Self::from_coeffs(field, self.coeffs.iter().map(|&c| field.mul(c, s)).collect())
    }

    pub fn mul<F: Field<Elem = E>>(&self, field: &F, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Self::from_coeffs(field, out)
    }

    /// Euclidean division, returning `(quotient, remainder)`.
    pub fn div_rem<F: Field<Elem = E>>(
        &self,
        field: &F,
        divisor: &Self,
    ) -> Result<(Self, Self), FieldError> {
        let dd = divisor.degree().ok_or(FieldError::ZeroInverse)?;
        let lead_inv = field.inv(divisor.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![field.zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = field.mul(rem[i + dd], lead_inv);
            quot[i] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = field.sub(rem[i + j], field.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(field, quot), Self::from_coeffs(field, rem)))
    }
}

/// Evaluates `q` at each abscissa by Horner's rule.
pub fn eval_many<F: Field>(field: &F, q: &Poly<F::Elem>, xs: &[F::Elem]) -> Vec<F::Elem> {
    xs.iter().map(|&x| q.eval(field, x)).collect()
}

/// The unique polynomial of degree below `points.len()` through every point,
/// via Newton divided differences in O(k^2).
pub fn interpolate<F: Field>(
    field: &F,
    points: &[(F::Elem, F::Elem)],
) -> Result<Poly<F::Elem>, FieldError> {
    if points.is_empty() {
        return Err(FieldError::Empty);
    }
    let xs: Vec<_> = points.iter().map(|p| p.0).collect();
    let mut c: Vec<_> = points.iter().map(|p| p.1).collect();
    let k = xs.len();
    // every pair (i, i - j) is visited once, so a repeated abscissa shows up
    // as a zero denominator
    for j in 1..k {
        for i in (j..k).rev() {
            let den = field.sub(xs[i], xs[i - j]);
            let inv = field.inv(den).map_err(|_| FieldError::DuplicateAbscissa)?;
            c[i] = field.mul(field.sub(c[i], c[i - 1]), inv);
        }
    }
    let mut acc = vec![c[k - 1]];
    for i in (0..k - 1).rev() {
        // acc <- acc * (z - x_i) + c_i
        let mut next = vec![field.zero(); acc.len() + 1];
        for (d, &a) in acc.iter().enumerate() {
            next[d + 1] = field.add(next[d + 1], a);
            next[d] = field.sub(next[d], field.mul(a, xs[i]));
        }
        next[0] = field.add(next[0], c[i]);
        acc = next;
    }
    Ok(Poly::from_coeffs(field, acc))
}

/// Weights `w_j = prod_{k != j} (target - x_k) / (x_j - x_k)`, so that
/// `sum_j w_j y_j` is the value at `target` of the interpolant through
/// `(x_j, y_j)`.
pub fn lagrange_weights<F: Field>(
    field: &F,
    nodes: &[F::Elem],
    target: F::Elem,
) -> Result<Vec<F::Elem>, FieldError> {
    let k = nodes.len();
    if k == 0 {
        return Err(FieldError::Empty);
    }
    let diffs: Vec<_> = nodes.iter().map(|&x| field.sub(target, x)).collect();
    // prefix/suffix products of (target - x_k)
    let mut prefix = vec![field.one(); k + 1];
    for i in 0..k {
        prefix[i + 1] = field.mul(prefix[i], diffs[i]);
    }
    let mut suffix = vec![field.one(); k + 1];
    for i in (0..k).rev() {
        suffix[i] = field.mul(suffix[i + 1], diffs[i]);
    }
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let mut den = field.one();
        for (m, &xm) in nodes.iter().enumerate() {
            if m != j {
                den = field.mul(den, field.sub(nodes[j], xm));
            }
        }
        let den_inv = field.inv(den).map_err(|_| FieldError::DuplicateAbscissa)?;
        out.push(field.mul(field.mul(prefix[j], suffix[j + 1]), den_inv));
    }
    Ok(out)
}

/// The Lagrange basis polynomials for distinct `nodes`.
pub fn lagrange_basis<F: Field>(
    field: &F,
    nodes: &[F::Elem],
) -> Result<Vec<Poly<F::Elem>>, FieldError> {
    if nodes.is_empty() {
        return Err(FieldError::Empty);
    }
    let mut basis = Vec::with_capacity(nodes.len());
    for (j, &xj) in nodes.iter().enumerate() {
        let mut num = Poly::constant(field, field.one());
        let mut den = field.one();
        for (m, &xm) in nodes.iter().enumerate() {
            if m != j {
                num = num.mul(field, &Poly::linear(field, xm));
                den = field.mul(den, field.sub(xj, xm));
            }
        }
        let den_inv = field.inv(den).map_err(|_| FieldError::DuplicateAbscissa)?;
        basis.push(num.scale(field, den_inv));
    }
    Ok(basis)
}
