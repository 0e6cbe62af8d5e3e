//! T-privacy checks.
//!
//! A coalition `𝒯` sees `X̃_𝒯 = X·U_top[𝒯] + Z·U_bottom[𝒯]`. If every `T×T`
//! submatrix of the bottom rows is invertible, then for each fixed `X` the
//! map `Z ↦ X̃_𝒯` is a bijection and the view is uniform whatever `X` is.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::codec::{build_matrix, EncodingMatrix};
use crate::field::{Field, FieldError, Fp, Matrix, PrimeField};
use crate::scheme::EvalPoints;

/// Enumeration guard for [`measure_mi_exhaustive`].
pub const MAX_STATES: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrivacyError {
    #[error("state space of {0} exceeds the enumeration guard")]
    StateSpaceTooLarge(u128),
    #[error("bottom submatrix for workers {0:?} is singular")]
    SingularSubmatrix(Vec<usize>),
    #[error("coalition of {size} exceeds T = {t}")]
    CoalitionTooLarge { size: usize, t: usize },
    #[error("worker {0} out of range")]
    UnknownWorker(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MdsAudit {
    Pass { subsets_checked: u64 },
    Fail { witness: Vec<usize> },
}

impl MdsAudit {
    pub fn passed(&self) -> bool {
        matches!(self, MdsAudit::Pass { .. })
    }
}

/// Calls `visit` with every `size`-subset of `0..n` in lexicographic order;
/// stops early when `visit` returns `false`.
pub fn for_each_subset(n: usize, size: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut i = size;
        while i > 0 && idx[i - 1] == i - 1 + n - size {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Checks every `T×T` submatrix of the bottom `T` rows of `U`.
pub fn audit_mds<F: Field>(field: &F, u: &EncodingMatrix<F::Elem>) -> MdsAudit {
    let t = u.t();
    if t == 0 {
        return MdsAudit::Pass { subsets_checked: 0 };
    }
    let bottom = u.bottom();
    let rows: Vec<usize> = (0..t).collect();
    let mut checked = 0u64;
    let mut witness = None;
    for_each_subset(u.n(), t, |cols| {
        checked += 1;
        let det = bottom.select(&rows, cols).determinant(field);
        if det.map_or(true, |d| field.is_zero(d)) {
            witness = Some(cols.to_vec());
            return false;
        }
        true
    });
    match witness {
        Some(witness) => MdsAudit::Fail { witness },
        None => MdsAudit::Pass { subsets_checked: checked },
    }
}

/// Inverse of `U_bottom[𝒯]` for a coalition of exactly `T` workers.
pub fn solve_collusion_mask<F: Field>(
    field: &F,
    u: &EncodingMatrix<F::Elem>,
    coalition: &[usize],
) -> Result<Matrix<F::Elem>, PrivacyError> {
    let rows: Vec<usize> = (0..u.t()).collect();
    if let Some(&w) = coalition.iter().find(|&&w| w >= u.n()) {
        return Err(PrivacyError::UnknownWorker(w));
    }
    u.bottom()
        .select(&rows, coalition)
        .inverse(field)
        .map_err(|_| PrivacyError::SingularSubmatrix(coalition.to_vec()))
}

/// For a failed audit: a nonzero pad difference `c` (one scalar per pad
/// block) with `c · U_bottom[witness] = 0`, so pads `Z` and `Z + c` give the
/// coalition identical views.
pub fn collision_witness<F: Field>(
    field: &F,
    u: &EncodingMatrix<F::Elem>,
    witness: &[usize],
) -> Option<Vec<F::Elem>> {
    let rows: Vec<usize> = (0..u.t()).collect();
    u.bottom().select(&rows, witness).left_kernel_vector(field)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MutualInformation {
    /// Exact: every `X` induces the same distribution of views.
    pub independent: bool,
    /// `I(X; X̃_𝒯)` in bits; exactly `0.0` when `independent`.
    pub bits: f64,
}

fn digits(p: u64, mut idx: u64, out: &mut [Fp], field: &PrimeField) {
    for d in out.iter_mut() {
        *d = field.elem(idx % p);
        idx /= p;
    }
}

/// Enumerates every dataset `X ∈ F^{M·K}` and pad `Z ∈ F^{M·T}` and
/// compares, per `X`, the histogram of what `coalition` sees.
pub fn measure_mi_exhaustive(
    field: &PrimeField,
    m: usize,
    points: &EvalPoints<Fp>,
    coalition: &[usize],
) -> Result<MutualInformation, PrivacyError> {
    let (k, t) = (points.k(), points.t());
    if coalition.len() > t.max(1) {
        return Err(PrivacyError::CoalitionTooLarge { size: coalition.len(), t });
    }
    if let Some(&w) = coalition.iter().find(|&&w| w >= points.n()) {
        return Err(PrivacyError::UnknownWorker(w));
    }
    let p = field.modulus();
    let states = (p as u128).checked_pow((m * (k + t)) as u32).unwrap_or(u128::MAX);
    if states > MAX_STATES as u128 {
        return Err(PrivacyError::StateSpaceTooLarge(states));
    }
    let xs = (p as u128).pow((m * k) as u32) as u64;
    let zs = (p as u128).pow((m * t) as u32) as u64;
    let u = build_matrix(field, points);

    let cols: Vec<Vec<Fp>> = coalition.iter().map(|&w| u.matrix().column(w)).collect();

    let mut xbuf = alloc::vec![field.zero(); m * k];
    let mut zbuf = alloc::vec![field.zero(); m * t];
    let mut view = alloc::vec![0u64; coalition.len() * m];
    let mut per_x: Vec<BTreeMap<Vec<u64>, u64>> = Vec::with_capacity(xs as usize);
    for xi in 0..xs {
        digits(p, xi, &mut xbuf, field);
        let mut hist = BTreeMap::new();
        for zi in 0..zs {
            digits(p, zi, &mut zbuf, field);
            for (w, col) in cols.iter().enumerate() {
                for c in 0..m {
                    let data = (0..k).map(|i| (xbuf[i * m + c], col[i]));
                    let pad = (0..t).map(|j| (zbuf[j * m + c], col[k + j]));
                    let v = data.chain(pad).fold(field.zero(), |acc, (a, b)| field.add(acc, field.mul(a, b)));
                    view[w * m + c] = v.value();
                }
            }
            *hist.entry(view.clone()).or_insert(0u64) += 1;
        }
        per_x.push(hist);
    }

    let independent = per_x.windows(2).all(|w| w[0] == w[1]);
    if independent {
        return Ok(MutualInformation { independent, bits: 0.0 });
    }
    let mut marginal: BTreeMap<&Vec<u64>, u64> = BTreeMap::new();
    for h in &per_x {
        for (v, c) in h {
            *marginal.entry(v).or_insert(0) += c;
        }
    }
    // I = (1/|X|) Σ_x Σ_v P(v|x) log2(P(v|x) / P(v)), P(v|x) = c/zs, P(v) = c_v/(xs·zs)
    let mut bits = 0.0;
    for h in &per_x {
        for (v, &c) in h {
            let ratio = (c as f64 * xs as f64) / marginal[v] as f64;
            bits += (c as f64 / zs as f64) * libm::log2(ratio);
        }
    }
    Ok(MutualInformation { independent, bits: bits / xs as f64 })
}
