//! Polynomial computations evaluated by the workers.
//!
//! Decoding only relies on the total degree of `f`, so every computation
//! carries a declared degree. The built-in kinds report their true degree;
//! user evaluators plugged in through [`Evaluator`] are trusted to.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use crate::field::Field;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FunctionError {
    #[error("input of length {got} does not fit {what}")]
    DimensionMismatch { what: &'static str, got: usize },
    #[error("invalid computation: {0}")]
    Invalid(&'static str),
}

/// One data chunk: a flat vector of `M` field elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Block<E>(Vec<E>);

impl<E> Block<E> {
    pub fn new(entries: Vec<E>) -> Self {
        Self(entries)
    }

    pub fn into_inner(self) -> Vec<E> {
        self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [E] {
        &mut self.0
    }
}

impl<E> Deref for Block<E> {
    type Target = [E];
    fn deref(&self) -> &[E] {
        &self.0
    }
}

impl<E> From<Vec<E>> for Block<E> {
    fn from(v: Vec<E>) -> Self {
        Self(v)
    }
}

impl<E> FromIterator<E> for Block<E> {
    fn from_iter<I: IntoIterator<Item = E>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Hook for computations outside the built-in set.
pub trait Evaluator<F: Field>: Send + Sync {
    fn name(&self) -> &str;
    /// Total degree of the map in the input entries.
    fn degree(&self) -> usize;
    fn eval(&self, field: &F, x: &[F::Elem]) -> Result<Vec<F::Elem>, FunctionError>;
}

pub enum ComputationKind<F: Field> {
    Identity,
    /// `x` is a row-major matrix with `b.len()` columns; output `x * b`.
    LinearMap { b: Vec<F::Elem> },
    ElementwiseSquare,
    /// `x` packs `A` (`rows x inner`) followed by `B` (`inner x cols`);
    /// output `A * B`, row-major.
    BilinearProduct { rows: usize, inner: usize, cols: usize },
    /// `x` is a row block with `w.len()` features; output `x^T x w`.
    GradientKernel { w: Vec<F::Elem> },
    /// `x` is split into `arity` equal groups; output is their
    /// coordinate-wise product.
    MultilinearMonomial { arity: usize },
    Custom(Arc<dyn Evaluator<F>>),
}

impl<F: Field> Clone for ComputationKind<F> {
    fn clone(&self) -> Self {
        match self {
            Self::Identity => Self::Identity,
            Self::LinearMap { b } => Self::LinearMap { b: b.clone() },
            Self::ElementwiseSquare => Self::ElementwiseSquare,
            &Self::BilinearProduct { rows, inner, cols } => {
                Self::BilinearProduct { rows, inner, cols }
            }
            Self::GradientKernel { w } => Self::GradientKernel { w: w.clone() },
            &Self::MultilinearMonomial { arity } => Self::MultilinearMonomial { arity },
            Self::Custom(e) => Self::Custom(Arc::clone(e)),
        }
    }
}

/// A polynomial map `V -> U` together with its declared total degree.
#[derive(Clone)]
pub struct ComputationSpec<F: Field> {
    kind: ComputationKind<F>,
}

impl<F: Field> fmt::Debug for ComputationSpec<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComputationSpec")
            .field("kind", &self.name())
            .field("degree", &self.degree())
            .finish()
    }
}

impl<F: Field> ComputationSpec<F> {
    pub fn new(kind: ComputationKind<F>) -> Result<Self, FunctionError> {
        match &kind {
            ComputationKind::LinearMap { b } if b.is_empty() => {
                return Err(FunctionError::Invalid("linear map needs a nonempty vector"))
            }
            ComputationKind::GradientKernel { w } if w.is_empty() => {
                return Err(FunctionError::Invalid("gradient kernel needs a nonempty weight"))
            }
            ComputationKind::BilinearProduct { rows, inner, cols }
                if *rows == 0 || *inner == 0 || *cols == 0 =>
            {
                return Err(FunctionError::Invalid("bilinear product needs nonzero dimensions"))
            }
            ComputationKind::MultilinearMonomial { arity: 0 } => {
                return Err(FunctionError::Invalid("monomial arity must be positive"))
            }
            ComputationKind::Custom(e) if e.degree() == 0 => {
                return Err(FunctionError::Invalid("declared degree must be positive"))
            }
            _ => {}
        }
        Ok(Self { kind })
    }

    pub fn identity() -> Self {
        Self { kind: ComputationKind::Identity }
    }

    pub fn square() -> Self {
        Self { kind: ComputationKind::ElementwiseSquare }
    }

    pub fn linear_map(b: Vec<F::Elem>) -> Result<Self, FunctionError> {
        Self::new(ComputationKind::LinearMap { b })
    }

    pub fn bilinear(rows: usize, inner: usize, cols: usize) -> Result<Self, FunctionError> {
        Self::new(ComputationKind::BilinearProduct { rows, inner, cols })
    }

    pub fn gradient_kernel(w: Vec<F::Elem>) -> Result<Self, FunctionError> {
        Self::new(ComputationKind::GradientKernel { w })
    }

    pub fn monomial(arity: usize) -> Result<Self, FunctionError> {
        Self::new(ComputationKind::MultilinearMonomial { arity })
    }

    pub fn custom(evaluator: Arc<dyn Evaluator<F>>) -> Result<Self, FunctionError> {
        Self::new(ComputationKind::Custom(evaluator))
    }

    pub fn kind(&self) -> &ComputationKind<F> {
        &self.kind
    }

    pub fn name(&self) -> &str {
        match &self.kind {
            ComputationKind::Identity => "identity",
            ComputationKind::LinearMap { .. } => "linear_map",
            ComputationKind::ElementwiseSquare => "elementwise_square",
            ComputationKind::BilinearProduct { .. } => "bilinear_product",
            ComputationKind::GradientKernel { .. } => "gradient_kernel",
            ComputationKind::MultilinearMonomial { .. } => "multilinear_monomial",
            ComputationKind::Custom(e) => e.name(),
        }
    }

    /// Declared total degree.
    pub fn degree(&self) -> usize {
        match &self.kind {
            ComputationKind::Identity | ComputationKind::LinearMap { .. } => 1,
            ComputationKind::ElementwiseSquare
            | ComputationKind::BilinearProduct { .. }
            | ComputationKind::GradientKernel { .. } => 2,
            ComputationKind::MultilinearMonomial { arity } => *arity,
            ComputationKind::Custom(e) => e.degree(),
        }
    }

    /// Output length for an input of length `m`, or why `m` does not fit.
    pub fn output_dim(&self, m: usize) -> Result<usize, FunctionError> {
        let mismatch = |what| Err(FunctionError::DimensionMismatch { what, got: m });
        match &self.kind {
            ComputationKind::Identity | ComputationKind::ElementwiseSquare => Ok(m),
            ComputationKind::LinearMap { b } => {
                if m == 0 || m % b.len() != 0 {
                    mismatch("a matrix with b.len() columns")
                } else {
                    Ok(m / b.len())
                }
            }
            &ComputationKind::BilinearProduct { rows, inner, cols } => {
                if m != rows * inner + inner * cols {
                    mismatch("the packed matrix pair")
                } else {
                    Ok(rows * cols)
                }
            }
            ComputationKind::GradientKernel { w } => {
                if m == 0 || m % w.len() != 0 {
                    mismatch("a row block with w.len() features")
                } else {
                    Ok(w.len())
                }
            }
            &ComputationKind::MultilinearMonomial { arity } => {
                if m == 0 || m % arity != 0 {
                    mismatch("arity equal groups")
                } else {
                    Ok(m / arity)
                }
            }
            ComputationKind::Custom(_) => Ok(m),
        }
    }

    pub fn eval(&self, field: &F, x: &[F::Elem]) -> Result<Block<F::Elem>, FunctionError> {
        let out_dim = self.output_dim(x.len())?;
        let out: Vec<F::Elem> = match &self.kind {
            ComputationKind::Identity => x.to_vec(),
            ComputationKind::ElementwiseSquare => x.iter().map(|&v| field.mul(v, v)).collect(),
            ComputationKind::LinearMap { b } => {
                x.chunks(b.len()).map(|row| field.dot(row, b)).collect()
            }
            &ComputationKind::BilinearProduct { rows, inner, cols } => {
                let (a, b) = x.split_at(rows * inner);
                let mut out = Vec::with_capacity(rows * cols);
                for i in 0..rows {
                    for j in 0..cols {
                        let mut acc = field.zero();
                        for k in 0..inner {
                            acc = field.add(acc, field.mul(a[i * inner + k], b[k * cols + j]));
                        }
                        out.push(acc);
                    }
                }
                out
            }
            ComputationKind::GradientKernel { w } => {
                let d = w.len();
                let mut out = alloc::vec![field.zero(); d];
                for row in x.chunks(d) {
                    let s = field.dot(row, w);
                    for (o, &v) in out.iter_mut().zip(row) {
                        *o = field.add(*o, field.mul(v, s));
                    }
                }
                out
            }
            &ComputationKind::MultilinearMonomial { arity } => {
                let g = out_dim;
                (0..g)
                    .map(|j| (0..arity).fold(field.one(), |acc, k| field.mul(acc, x[k * g + j])))
                    .collect()
            }
            ComputationKind::Custom(e) => e.eval(field, x)?,
        };
        Ok(Block(out))
    }
}
