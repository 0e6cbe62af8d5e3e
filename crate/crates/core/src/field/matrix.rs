use alloc::vec;
use alloc::vec::Vec;

use super::{Field, FieldError};

/// Row-major dense matrix over a [`Field`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy> Matrix<E> {
    pub fn from_rows(rows: usize, cols: usize, data: Vec<E>) -> Result<Self, FieldError> {
        if data.len() != rows * cols {
            return Err(FieldError::Shape);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn identity<F: Field<Elem = E>>(field: &F, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> E {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// The submatrix on the given rows and columns, in the order given.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    pub fn mul<F: Field<Elem = E>>(&self, field: &F, rhs: &Self) -> Result<Self, FieldError> {
        if self.cols != rhs.rows {
            return Err(FieldError::Shape);
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(field.zero(), |acc, k| {
                field.add(acc, field.mul(self.get(i, k), rhs.get(k, j)))
            })
        }))
    }

    pub fn determinant<F: Field<Elem = E>>(&self, field: &F) -> Result<E, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::Shape);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = field.one();
        for col in 0..n {
            let Some(piv) = pivot_row(field, &a, col, col) else {
                return Ok(field.zero());
            };
            if piv != col {
                a.swap_rows(piv, col);
                det = field.neg(det);
            }
            let p = a.get(col, col);
            det = field.mul(det, p);
            let p_inv = field.inv(p)?;
            for r in col + 1..n {
                let factor = field.mul(a.get(r, col), p_inv);
                if field.is_zero(factor) {
                    continue;
                }
                for c in col..n {
                    let v = field.sub(a.get(r, c), field.mul(factor, a.get(col, c)));
                    a.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    pub fn inverse<F: Field<Elem = E>>(&self, field: &F) -> Result<Self, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::Shape);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(field, n);
        for col in 0..n {
            let piv = pivot_row(field, &a, col, col).ok_or(FieldError::Singular)?;
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            let p_inv = field.inv(a.get(col, col))?;
            for c in 0..n {
                a.set(col, c, field.mul(a.get(col, c), p_inv));
                inv.set(col, c, field.mul(inv.get(col, c), p_inv));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col);
                if field.is_zero(factor) {
                    continue;
                }
                for c in 0..n {
                    a.set(r, c, field.sub(a.get(r, c), field.mul(factor, a.get(col, c))));
                    inv.set(r, c, field.sub(inv.get(r, c), field.mul(factor, inv.get(col, c))));
                }
            }
        }
        Ok(inv)
    }

    /// Some solution of `self * x = rhs`, with free variables set to zero.
    /// `None` when the system is inconsistent.
    pub fn solve_any<F: Field<Elem = E>>(&self, field: &F, rhs: &[E]) -> Option<Vec<E>> {
        assert_eq!(rhs.len(), self.rows);
        let (mut a, pivots) = self.augmented(field, rhs);
        let width = self.cols;
        // inconsistent if a zero row has a nonzero right-hand side
        for r in pivots.len()..self.rows {
            if !field.is_zero(a.get(r, width)) {
                return None;
            }
        }
        let mut x = vec![field.zero(); width];
        for (r, &c) in pivots.iter().enumerate().rev() {
            let mut v = a.get(r, width);
            for cc in c + 1..width {
                v = field.sub(v, field.mul(a.get(r, cc), x[cc]));
            }
            x[c] = v;
            a.set(r, width, v);
        }
        Some(x)
    }

    /// A nonzero `v` with `v * self = 0` (left kernel), if any.
    pub fn left_kernel_vector<F: Field<Elem = E>>(&self, field: &F) -> Option<Vec<E>> {
        self.transpose().kernel_vector(field)
    }

    /// A nonzero `x` with `self * x = 0`, if any.
    pub fn kernel_vector<F: Field<Elem = E>>(&self, field: &F) -> Option<Vec<E>> {
        let zeros = vec![field.zero(); self.rows];
        let (a, pivots) = self.augmented(field, &zeros);
        let free = (0..self.cols).find(|c| !pivots.contains(c))?;
        let mut x = vec![field.zero(); self.cols];
        x[free] = field.one();
        for (r, &c) in pivots.iter().enumerate().rev() {
            let mut v = field.zero();
            for cc in c + 1..self.cols {
                v = field.sub(v, field.mul(a.get(r, cc), x[cc]));
            }
            x[c] = v;
        }
        Some(x)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Row echelon form of `[self | rhs]` with unit pivots; returns the pivot
    /// column of each leading row.
    fn augmented<F: Field<Elem = E>>(&self, field: &F, rhs: &[E]) -> (Self, Vec<usize>) {
        let w = self.cols + 1;
        let mut a = Self::from_fn(self.rows, w, |i, j| {
            if j < self.cols {
                self.get(i, j)
            } else {
                rhs[i]
            }
        });
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = pivot_row(field, &a, row, col) else {
                continue;
            };
            a.swap_rows(piv, row);
            let p_inv = field.inv(a.get(row, col)).expect("pivot is nonzero");
            for c in col..w {
                a.set(row, c, field.mul(a.get(row, c), p_inv));
            }
            for r in row + 1..self.rows {
                let factor = a.get(r, col);
                if field.is_zero(factor) {
                    continue;
                }
                for c in col..w {
                    a.set(r, c, field.sub(a.get(r, c), field.mul(factor, a.get(row, c))));
                }
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

fn pivot_row<F: Field>(field: &F, a: &Matrix<F::Elem>, from: usize, col: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for r in from..a.rows {
        let m = field.magnitude(a.get(r, col));
        if m > 0.0 && best.map_or(true, |(_, bm)| m > bm) {
            best = Some((r, m));
        }
    }
    best.map(|(r, _)| r)
}
