//! Master-side decoding.
//!
//! Worker `j` returns `f(u(alpha_j))`, an evaluation of the composition
//! polynomial `f(u(z))` of degree at most `D = deg f · (K+T-1)`. Collected
//! returns therefore form a Reed-Solomon codeword with erasures (stragglers)
//! and errors (adversaries). Every output coordinate is its own codeword;
//! adversaries found in one coordinate are dropped for the rest.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::field::{lagrange_weights, Field, FieldError, Matrix, Poly};
use crate::functions::Block;
use crate::scheme::{EvalPoints, SchemeParams, Variant};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("need {needed} returns, got {got}")]
    NotEnoughReturns { needed: usize, got: usize },
    #[error("more corrupted results than the adversary budget (coordinate {coordinate})")]
    DecodingFailure { coordinate: usize },
    #[error("worker {0} is not part of the scheme")]
    UnknownWorker(usize),
    #[error("worker {0} shares its evaluation point with an earlier return")]
    DuplicatePoint(usize),
    #[error("payloads have inconsistent lengths")]
    PayloadLength,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// What the decoder sees from one worker: an id and a payload, nothing else.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Evaluation<E> {
    pub worker: usize,
    pub payload: Block<E>,
}

/// Degree bound of the composition and the number of errors to correct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecodeBudget {
    pub degree: usize,
    pub adversaries: usize,
}

impl DecodeBudget {
    pub fn for_params(params: &SchemeParams) -> Self {
        Self { degree: params.composition_degree(), adversaries: params.a }
    }

    /// `D + 2A + 1`.
    pub fn required(&self) -> usize {
        self.degree + 2 * self.adversaries + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Decoded<E> {
    /// `f(X_1), …, f(X_K)`.
    pub blocks: Vec<Block<E>>,
    /// Workers whose payload disagreed with the decoded codeword.
    pub corrected: BTreeSet<usize>,
    /// Workers whose returns were consumed, in arrival order.
    pub used: Vec<usize>,
}

/// First `count` returns with pairwise distinct evaluation points. Later
/// duplicates of a point already taken are skipped.
fn select_distinct<'a, F: Field>(
    returns: &'a [Evaluation<F::Elem>],
    points: &EvalPoints<F::Elem>,
    count: usize,
    allow_duplicates: bool,
) -> Result<Vec<&'a Evaluation<F::Elem>>, DecodeError> {
    let mut taken: Vec<&Evaluation<F::Elem>> = Vec::with_capacity(count);
    let mut xs: Vec<F::Elem> = Vec::with_capacity(count);
    for r in returns {
        if taken.len() == count {
            break;
        }
        let x = *points.alphas().get(r.worker).ok_or(DecodeError::UnknownWorker(r.worker))?;
        if xs.contains(&x) {
            if allow_duplicates {
                continue;
            }
            return Err(DecodeError::DuplicatePoint(r.worker));
        }
        xs.push(x);
        taken.push(r);
    }
    if taken.len() < count {
        return Err(DecodeError::NotEnoughReturns { needed: count, got: taken.len() });
    }
    let len = taken[0].payload.len();
    if taken.iter().any(|r| r.payload.len() != len) {
        return Err(DecodeError::PayloadLength);
    }
    Ok(taken)
}

/// `weights[i][j]`: coefficient of node `j` when evaluating the interpolant
/// at `targets[i]`.
fn weight_table<F: Field>(
    field: &F,
    nodes: &[F::Elem],
    targets: &[F::Elem],
) -> Result<Vec<Vec<F::Elem>>, FieldError> {
    targets.iter().map(|&t| lagrange_weights(field, nodes, t)).collect()
}

fn apply<F: Field>(field: &F, weights: &[F::Elem], values: impl Iterator<Item = F::Elem>) -> F::Elem {
    weights
        .iter()
        .zip(values)
        .fold(field.zero(), |acc, (&w, v)| field.add(acc, field.mul(w, v)))
}

/// Error-free decoding from the first `degree + 1` returns at distinct
/// points.
pub fn decode_clean<F: Field>(
    field: &F,
    returns: &[Evaluation<F::Elem>],
    points: &EvalPoints<F::Elem>,
    degree: usize,
) -> Result<Decoded<F::Elem>, DecodeError> {
    let used = select_distinct::<F>(returns, points, degree + 1, true)?;
    let nodes: Vec<_> = used.iter().map(|r| points.alphas()[r.worker]).collect();
    let table = weight_table(field, &nodes, points.data_betas())?;
    let len = used[0].payload.len();
    let blocks = table
        .iter()
        .map(|w| {
            (0..len)
                .map(|c| apply(field, w, used.iter().map(|r| r.payload[c])))
                .collect()
        })
        .collect();
    Ok(Decoded {
        blocks,
        corrected: BTreeSet::new(),
        used: used.iter().map(|r| r.worker).collect(),
    })
}

/// Interpolation weights for one set of trusted nodes: `base` reconstructs
/// the polynomial, `checks` predicts every other active node from it.
struct ActiveSet<E> {
    active: Vec<usize>,
    beta_weights: Vec<Vec<E>>,
    check_weights: Vec<Vec<E>>,
}

impl<E: Copy + PartialEq> ActiveSet<E> {
    fn new<F: Field<Elem = E>>(
        field: &F,
        xs: &[E],
        active: Vec<usize>,
        degree: usize,
        betas: &[E],
    ) -> Result<Self, FieldError> {
        let base: Vec<E> = active[..degree + 1].iter().map(|&i| xs[i]).collect();
        let rest: Vec<E> = active[degree + 1..].iter().map(|&i| xs[i]).collect();
        Ok(Self {
            beta_weights: weight_table(field, &base, betas)?,
            check_weights: weight_table(field, &base, &rest)?,
            active,
        })
    }
}

/// Decoding with up to `budget.adversaries` arbitrarily corrupted payloads,
/// using the first `D + 2A + 1` returns.
pub fn decode_robust<F: Field>(
    field: &F,
    returns: &[Evaluation<F::Elem>],
    points: &EvalPoints<F::Elem>,
    budget: DecodeBudget,
) -> Result<Decoded<F::Elem>, DecodeError> {
    if budget.adversaries == 0 {
        return decode_clean(field, returns, points, budget.degree);
    }
    let used = select_distinct::<F>(returns, points, budget.required(), false)?;
    let xs: Vec<_> = used.iter().map(|r| points.alphas()[r.worker]).collect();
    let betas = points.data_betas();
    let d = budget.degree;
    let len = used[0].payload.len();

    let mut bad: BTreeSet<usize> = BTreeSet::new();
    let mut set = ActiveSet::new(field, &xs, (0..used.len()).collect(), d, betas)?;
    let mut outputs: Vec<Vec<F::Elem>> = alloc::vec![Vec::with_capacity(len); betas.len()];

    for c in 0..len {
        let ys: Vec<_> = used.iter().map(|r| r.payload[c]).collect();
        let base_vals = || set.active[..d + 1].iter().map(|&i| ys[i]);
        let consistent = set
            .check_weights
            .iter()
            .zip(&set.active[d + 1..])
            .all(|(w, &i)| apply(field, w, base_vals()) == ys[i]);
        if consistent {
            for (out, w) in outputs.iter_mut().zip(&set.beta_weights) {
                out.push(apply(field, w, base_vals()));
            }
            continue;
        }
        let remaining = budget.adversaries - bad.len();
        if remaining == 0 {
            return Err(DecodeError::DecodingFailure { coordinate: c });
        }
        let ax: Vec<_> = set.active.iter().map(|&i| xs[i]).collect();
        let ay: Vec<_> = set.active.iter().map(|&i| ys[i]).collect();
        let poly = berlekamp_welch(field, &ax, &ay, d, remaining)
            .ok_or(DecodeError::DecodingFailure { coordinate: c })?;
        let wrong: Vec<usize> = set
            .active
            .iter()
            .copied()
            .filter(|&i| poly.eval(field, xs[i]) != ys[i])
            .collect();
        if wrong.is_empty() || wrong.len() > remaining {
            return Err(DecodeError::DecodingFailure { coordinate: c });
        }
        for (out, &b) in outputs.iter_mut().zip(betas) {
            out.push(poly.eval(field, b));
        }
        bad.extend(wrong.iter().copied());
        let active = set.active.iter().copied().filter(|i| !bad.contains(i)).collect();
        set = ActiveSet::new(field, &xs, active, d, betas)?;
    }
    Ok(Decoded {
        blocks: outputs.into_iter().map(Block::new).collect(),
        corrected: bad.iter().map(|&i| used[i].worker).collect(),
        used: used.iter().map(|r| r.worker).collect(),
    })
}

/// Berlekamp-Welch: find `E` monic of degree `errors` and `Q` of degree at
/// most `degree + errors` with `Q(x_i) = y_i E(x_i)`, then return `Q / E`.
/// Needs `xs.len() >= degree + 2·errors + 1`.
pub fn berlekamp_welch<F: Field>(
    field: &F,
    xs: &[F::Elem],
    ys: &[F::Elem],
    degree: usize,
    errors: usize,
) -> Option<Poly<F::Elem>> {
    let n = xs.len();
    debug_assert!(n >= degree + 2 * errors + 1);
    let q_len = degree + errors + 1;
    let unknowns = q_len + errors;
    let mut rhs = Vec::with_capacity(n);
    let system = Matrix::from_fn(n, unknowns, |i, j| {
        if j < q_len {
            field.pow(xs[i], j as u64)
        } else {
            field.neg(field.mul(ys[i], field.pow(xs[i], (j - q_len) as u64)))
        }
    });
    for i in 0..n {
        rhs.push(field.mul(ys[i], field.pow(xs[i], errors as u64)));
    }
    let sol = system.solve_any(field, &rhs)?;
    let q = Poly::from_coeffs(field, sol[..q_len].to_vec());
    let mut e_coeffs = sol[q_len..].to_vec();
    e_coeffs.push(field.one());
    let e = Poly::from_coeffs(field, e_coeffs);
    let (p, rem) = q.div_rem(field, &e).ok()?;
    if !rem.is_zero() || p.degree().unwrap_or(0) > degree {
        return None;
    }
    Some(p)
}

/// `S_k = sum_i y_i alpha_i^k / prod_{j != i} (alpha_i - alpha_j)` for
/// `k = 0..2A`, one vector per `k` holding every output coordinate. Sums run
/// over all given returns.
pub fn syndromes<F: Field>(
    field: &F,
    returns: &[Evaluation<F::Elem>],
    points: &EvalPoints<F::Elem>,
    adversaries: usize,
) -> Result<Vec<Vec<F::Elem>>, DecodeError> {
    if adversaries == 0 {
        return Ok(Vec::new());
    }
    let used = select_distinct::<F>(returns, points, returns.len(), false)?;
    let xs: Vec<_> = used.iter().map(|r| points.alphas()[r.worker]).collect();
    let len = used[0].payload.len();
    let scale: Vec<F::Elem> = xs
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let den = xs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(field.one(), |acc, (_, &xj)| field.mul(acc, field.sub(xi, xj)));
            field.inv(den)
        })
        .collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(2 * adversaries);
    let mut powers: Vec<F::Elem> = alloc::vec![field.one(); xs.len()];
    for _ in 0..2 * adversaries {
        let s_k = (0..len)
            .map(|c| {
                (0..xs.len()).fold(field.zero(), |acc, i| {
                    let term = field.mul(field.mul(used[i].payload[c], powers[i]), scale[i]);
                    field.add(acc, term)
                })
            })
            .collect();
        out.push(s_k);
        for (p, &x) in powers.iter_mut().zip(&xs) {
            *p = field.mul(*p, x);
        }
    }
    Ok(out)
}

/// For a single error, `S_1 / S_0` is the corrupted worker's point.
pub fn locate_single_error<F: Field>(field: &F, syndromes: &[Vec<F::Elem>], coordinate: usize) -> Option<F::Elem> {
    let s0 = *syndromes.first()?.get(coordinate)?;
    let s1 = *syndromes.get(1)?.get(coordinate)?;
    field.div(s1, s0).ok()
}

/// Majority decoding for the repetition layout: per block, the first
/// `2A + 1` replica returns vote.
pub fn decode_repetition<E: Copy + PartialEq>(
    returns: &[Evaluation<E>],
    points: &EvalPoints<E>,
    adversaries: usize,
) -> Result<Decoded<E>, DecodeError> {
    let replica_of = points.replica_of().ok_or(DecodeError::NotEnoughReturns { needed: 0, got: 0 })?;
    let quorum = 2 * adversaries + 1;
    let mut votes: Vec<Vec<&Evaluation<E>>> = alloc::vec![Vec::new(); points.k()];
    let mut used = Vec::new();
    for r in returns {
        let block = *replica_of.get(r.worker).ok_or(DecodeError::UnknownWorker(r.worker))?;
        if votes[block].len() < quorum {
            votes[block].push(r);
            used.push(r.worker);
        }
        if votes.iter().all(|v| v.len() == quorum) {
            break;
        }
    }
    let mut blocks = Vec::with_capacity(points.k());
    let mut corrected = BTreeSet::new();
    for (i, v) in votes.iter().enumerate() {
        if v.len() < quorum {
            return Err(DecodeError::NotEnoughReturns { needed: quorum, got: v.len() });
        }
        let winner = v
            .iter()
            .find(|cand| v.iter().filter(|o| o.payload == cand.payload).count() > adversaries)
            .ok_or(DecodeError::DecodingFailure { coordinate: i })?;
        corrected.extend(v.iter().filter(|o| o.payload != winner.payload).map(|o| o.worker));
        blocks.push(winner.payload.clone());
    }
    Ok(Decoded { blocks, corrected, used })
}

/// Dispatches on the layout the points were built for.
pub fn decode<F: Field>(
    field: &F,
    returns: &[Evaluation<F::Elem>],
    points: &EvalPoints<F::Elem>,
    params: &SchemeParams,
) -> Result<Decoded<F::Elem>, DecodeError> {
    match params.variant {
        Variant::Lagrange => decode_robust(field, returns, points, DecodeBudget::for_params(params)),
        Variant::UncodedRepetition => decode_repetition(returns, points, params.a),
    }
}
