//! Least-squares regression by coded gradient descent.
//!
//! Rows of `X` (`m × d`) are grouped into `K = ceil(n/r)` row blocks
//! `X̄_1..X̄_K`, padded with zero rows to equal height. Worker `j` stores
//! the Lagrange combination `X̃_j = u(alpha_j)` with betas `1..K` and alphas
//! `0..n-1`, and each iteration returns `X̃_jᵀ X̃_j w`, a degree-2 function
//! of its share. From any `2K - 1` returns the master decodes every
//! `X̄_kᵀ X̄_k w`, sums them to `Xᵀ X w` and forms
//! `2 (Xᵀ X w − Xᵀ y)` with `Xᵀ y` computed once up front.
//!
//! The descent is Nesterov's: the gradient is taken at the look-ahead point
//! `v`, then `w' = v − η g` and `v' = w' + μ (w' − w)`.

mod quantize;

pub use quantize::{QuantizationConfig, QuantizedProblem};

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{build_matrix, encode, CodecError, RandomPad};
use crate::field::{lagrange_weights, Dd, DdField, Field, FieldError, Fp, PrimeField, RealField};
use crate::functions::{Block, ComputationSpec, FunctionError};
use crate::rsdecode::{decode_clean, DecodeError, Evaluation};
use crate::scheme::{regression_lower_bound, regression_points, regression_threshold, EvalPoints, SchemeError};
use crate::simulator::{order_statistic, DelayModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegressionError {
    #[error("{got} does not fit {what}")]
    DimensionMismatch { what: &'static str, got: usize },
    #[error("n = {n}, r = {r}: threshold {threshold} exceeds the worker count")]
    InfeasibleParams { n: usize, r: usize, threshold: usize },
    #[error("values up to {bound:e} would wrap around the field (limit {guard:e})")]
    OverflowRisk { bound: f64, guard: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// `X` row-major `m × d`, labels `y`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegressionProblem {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub m: usize,
    pub d: usize,
}

impl RegressionProblem {
    pub fn new(x: Vec<f64>, y: Vec<f64>, d: usize) -> Result<Self, RegressionError> {
        if d == 0 || x.len() % d != 0 {
            return Err(RegressionError::DimensionMismatch { what: "rows of d features", got: x.len() });
        }
        let m = x.len() / d;
        if y.len() != m || m == 0 {
            return Err(RegressionError::DimensionMismatch { what: "one label per row", got: y.len() });
        }
        Ok(Self { x, y, m, d })
    }

    /// Uniform features in `[-1, 1)`, a uniform true weight `w*`, and
    /// noiseless labels `y = x·w*`. Returns the problem and `w*`.
    pub fn synthetic(m: usize, d: usize, seed: u64) -> (Self, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || rng.gen::<f64>() * 2.0 - 1.0;
        let w_star: Vec<f64> = (0..d).map(|_| draw()).collect();
        let x: Vec<f64> = (0..m * d).map(|_| draw()).collect();
        let y = x.chunks(d).map(|row| dot(row, &w_star)).collect();
        (Self { x, y, m, d }, w_star)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.x.chunks(self.d)
    }

    /// Mean squared residual.
    pub fn loss(&self, w: &[f64]) -> f64 {
        self.rows().zip(&self.y).map(|(r, &y)| sq(dot(r, w) - y)).sum::<f64>() / self.m as f64
    }

    pub fn quantize(&self, config: QuantizationConfig) -> Result<QuantizedProblem, RegressionError> {
        Ok(QuantizedProblem { xq: config.quantize(&self.x)?, yq: config.quantize(&self.y)?, m: self.m, d: self.d, config })
    }

    /// `2 Xᵀ y`.
    fn xty2(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.d];
        for (row, &y) in self.rows().zip(&self.y) {
            for (o, &v) in out.iter_mut().zip(row) {
                *o += 2.0 * v * y;
            }
        }
        out
    }

    /// Largest eigenvalue of `2 XᵀX` by power iteration, for the default step.
    fn smoothness(&self) -> f64 {
        let mut v = alloc::vec![1.0; self.d];
        let mut lambda = 0.0;
        for _ in 0..100 {
            let mut next = alloc::vec![0.0; self.d];
            for row in self.rows() {
                let s = dot(row, &v);
                for (o, &x) in next.iter_mut().zip(row) {
                    *o += 2.0 * x * s;
                }
            }
            let norm = libm::sqrt(next.iter().map(|&x| sq(x)).sum());
            if norm == 0.0 {
                return 1.0;
            }
            lambda = norm / libm::sqrt(v.iter().map(|&x| sq(x)).sum());
            v = next.iter().map(|x| x / norm).collect();
        }
        lambda
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq(x: f64) -> f64 {
    x * x
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|&x| sq(x)).sum())
}

/// `2 Xᵀ (X w − y)`, accumulated in double-double and rounded once, so the
/// result stays accurate when the residual cancels near the optimum.
pub fn gradient_direct(problem: &RegressionProblem, w: &[f64]) -> Result<Vec<f64>, RegressionError> {
    if w.len() != problem.d {
        return Err(RegressionError::DimensionMismatch { what: "one weight per feature", got: w.len() });
    }
    let mut g = alloc::vec![Dd::ZERO; problem.d];
    for (row, &y) in problem.rows().zip(&problem.y) {
        let xw = row.iter().zip(w).fold(Dd::ZERO, |acc, (&x, &wi)| acc.add(Dd::from_f64(x).mul_f64(wi)));
        let resid = xw.sub(Dd::from_f64(y));
        for (gi, &x) in g.iter_mut().zip(row) {
            *gi = gi.add(resid.mul_f64(2.0 * x));
        }
    }
    Ok(g.iter().map(|v| v.to_f64()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Mode {
    Real,
    Field(QuantizationConfig),
}

/// Arithmetic used for shares, worker evaluations and the decode in real
/// mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Precision {
    /// Plain `f64`. Decode rounding is amplified by the subset's condition
    /// number and overtakes the gradient once the iterate nears the optimum.
    Double,
    /// Double-double; the gradient handed to the update is rounded to `f64`.
    #[default]
    Extended,
}

impl Precision {
    pub fn unit_roundoff(self) -> f64 {
        match self {
            Precision::Double => f64::EPSILON,
            Precision::Extended => DdField::UNIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StragglerPlan {
    /// The same workers never return.
    Fixed(BTreeSet<usize>),
    /// A fresh uniform set of this size every iteration.
    Random(usize),
}

/// Where `y` enters the gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LabelPlacement {
    /// Workers return `X̃ᵀ X̃ w`; the master subtracts its own `Xᵀ y`.
    Master,
    /// Each block is stored as `[X̄_k | ȳ_k]` and workers return
    /// `X̃ᵀ (X̃ w − ỹ)`, still degree 2. The payload shrinks with the
    /// residual, so decode rounding shrinks with it near the optimum where
    /// `XᵀXw − Xᵀy` cancels.
    Coded,
}

impl GdConfig {
    pub fn label_placement(&self) -> LabelPlacement {
        self.labels.unwrap_or(match self.mode {
            Mode::Real => LabelPlacement::Coded,
            Mode::Field(_) => LabelPlacement::Master,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GdConfig {
    pub n: usize,
    pub r: usize,
    pub iterations: usize,
    /// `None` picks `1 / L` with `L` the largest eigenvalue of `2 XᵀX`.
    pub step: Option<f64>,
    pub momentum: f64,
    pub mode: Mode,
    /// Real mode only.
    pub precision: Precision,
    pub stragglers: StragglerPlan,
    /// `None` uses [`LabelPlacement::Master`] in field mode and
    /// [`LabelPlacement::Coded`] in real mode.
    pub labels: Option<LabelPlacement>,
    pub delay: DelayModel,
    /// Relative error budget behind the conditioning warning (real mode).
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            n: 40,
            r: 10,
            iterations: 100,
            step: None,
            momentum: 0.9,
            mode: Mode::Real,
            precision: Precision::Extended,
            stragglers: StragglerPlan::Random(0),
            labels: None,
            delay: DelayModel::default(),
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Warning {
    /// Rounding in the decode may be amplified by about `estimate`;
    /// `estimate` times the unit roundoff exceeded the tolerance.
    Conditioning { iteration: usize, estimate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationRecord {
    pub iteration: usize,
    /// Loss at the iterate produced by this step.
    pub loss: f64,
    /// `|ĝ − g| / |g|` against the direct gradient at the same point. Zero in
    /// field mode when the decode is exact.
    pub rel_error: f64,
    /// Field mode: decoded gradient equals the direct integer gradient.
    pub exact: bool,
    pub used: Vec<usize>,
    pub wall_clock: f64,
    pub comm: f64,
    pub comp: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GdResult {
    pub w: Vec<f64>,
    pub initial_loss: f64,
    pub threshold: usize,
    pub lower_bound: usize,
    pub k: usize,
    pub iterations: Vec<IterationRecord>,
    pub warnings: Vec<Warning>,
    pub comm: f64,
    pub comp: f64,
    pub total: f64,
}

impl GdResult {
    pub fn losses(&self) -> Vec<f64> {
        self.iterations.iter().map(|r| r.loss).collect()
    }

    pub fn max_rel_error(&self) -> f64 {
        self.iterations.iter().map(|r| r.rel_error).fold(0.0, f64::max)
    }

    pub fn all_exact(&self) -> bool {
        self.iterations.iter().all(|r| r.exact)
    }
}

/// Shares stored by the workers, fixed at setup.
struct Storage<F: Field> {
    field: F,
    points: EvalPoints<F::Elem>,
    shares: Vec<Block<F::Elem>>,
    width: usize,
}

impl<F: Field> Storage<F> {
    /// `rows` is row-major with `width` entries per row.
    fn new(field: F, rows: &[F::Elem], width: usize, k: usize, n: usize) -> Result<Self, RegressionError> {
        let m = rows.len() / width;
        let height = m.div_ceil(k);
        let mut blocks: Vec<Block<F::Elem>> = rows
            .chunks(height * width)
            .map(|c| {
                let mut b = c.to_vec();
                b.resize(height * width, field.zero());
                Block::new(b)
            })
            .collect();
        blocks.resize(k, Block::new(alloc::vec![field.zero(); height * width]));
        let points = regression_points(&field, k, n)?;
        let shares = encode(&field, &blocks, &RandomPad::none(), &build_matrix(&field, &points))?;
        Ok(Self { field, points, shares, width })
    }

    /// Each worker in `used` evaluates `X̃ᵀ X̃ w` on its stored rows; the
    /// master decodes and sums the `K` per-block results.
    fn product(&self, w: &[F::Elem], used: &[usize]) -> Result<Vec<F::Elem>, RegressionError> {
        let spec = ComputationSpec::<F>::gradient_kernel(w.to_vec())?;
        let returns: Vec<Evaluation<F::Elem>> = used
            .iter()
            .map(|&j| Ok(Evaluation { worker: j, payload: spec.eval(&self.field, &self.shares[j])? }))
            .collect::<Result<_, RegressionError>>()?;
        let degree = 2 * (self.points.k() - 1);
        let decoded = decode_clean(&self.field, &returns, &self.points, degree)?;
        let mut sum = alloc::vec![self.field.zero(); self.width];
        for b in &decoded.blocks {
            for (s, &v) in sum.iter_mut().zip(b.iter()) {
                *s = self.field.add(*s, v);
            }
        }
        Ok(sum)
    }
}

/// FNV-1a over every stored element's magnitude bits.
fn digest<F: Field>(s: &Storage<F>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for share in &s.shares {
        for &e in share.iter() {
            for byte in s.field.magnitude(e).to_bits().to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
    }
    h
}

/// `xty2` is the master's `2 Xᵀ y`, present only for [`LabelPlacement::Master`].
enum Backend {
    Real { storage: Storage<RealField>, xty2: Option<Vec<f64>> },
    Extended { storage: Storage<DdField>, xty2: Option<Vec<Dd>> },
    Field { storage: Storage<PrimeField>, quantized: QuantizedProblem, xty2: Option<Vec<Fp>> },
}

fn with_labels<E: Copy>(x: &[E], y: &[E], d: usize) -> Vec<E> {
    x.chunks(d).zip(y).flat_map(|(row, &l)| row.iter().copied().chain(core::iter::once(l))).collect()
}

/// Coded storage plus whatever the master keeps for itself.
pub struct CodedRegression<'a> {
    problem: &'a RegressionProblem,
    config: GdConfig,
    k: usize,
    threshold: usize,
    backend: Backend,
    digest: u64,
}

impl<'a> CodedRegression<'a> {
    pub fn setup(problem: &'a RegressionProblem, config: GdConfig) -> Result<Self, RegressionError> {
        let (n, r) = (config.n, config.r);
        if n == 0 || r == 0 || r > n {
            return Err(RegressionError::DimensionMismatch { what: "1 <= r <= n", got: r });
        }
        let k = n.div_ceil(r);
        let threshold = regression_threshold(n, r);
        if threshold > n {
            return Err(RegressionError::InfeasibleParams { n, r, threshold });
        }
        let coded = config.label_placement() == LabelPlacement::Coded;
        let d = problem.d;
        let backend = match config.mode {
            Mode::Real if config.precision == Precision::Double => {
                let storage = if coded {
                    Storage::new(RealField, &with_labels(&problem.x, &problem.y, d), d + 1, k, n)?
                } else {
                    Storage::new(RealField, &problem.x, d, k, n)?
                };
                Backend::Real { storage, xty2: (!coded).then(|| problem.xty2()) }
            }
            Mode::Real => {
                let lift = |v: &[f64]| v.iter().map(|&x| Dd::from_f64(x)).collect::<Vec<_>>();
                let (x, y) = (lift(&problem.x), lift(&problem.y));
                let storage = if coded {
                    Storage::new(DdField, &with_labels(&x, &y, d), d + 1, k, n)?
                } else {
                    Storage::new(DdField, &x, d, k, n)?
                };
                let xty2 = (!coded).then(|| {
                    let mut out = alloc::vec![Dd::ZERO; d];
                    for (row, &l) in problem.rows().zip(&problem.y) {
                        for (o, &v) in out.iter_mut().zip(row) {
                            *o = o.add(Dd::from_f64(v).mul_f64(2.0 * l));
                        }
                    }
                    out
                });
                Backend::Extended { storage, xty2 }
            }
            Mode::Field(q) => {
                let field = q.field()?;
                let quantized = problem.quantize(q)?;
                let xq = q.to_field(&field, &quantized.xq);
                let s = q.scale_int();
                if coded {
                    // labels lifted to power 2 so that X̃ w − ỹ is homogeneous
                    let yq: Vec<Fp> = quantized.yq.iter().map(|&y| field.from_i128(y as i128 * s)).collect();
                    let storage = Storage::new(field.clone(), &with_labels(&xq, &yq, d), d + 1, k, n)?;
                    Backend::Field { storage, quantized, xty2: None }
                } else {
                    let storage = Storage::new(field.clone(), &xq, d, k, n)?;
                    // 2 · s · Xqᵀ yq, power 3
                    let mut xty2 = alloc::vec![0i128; d];
                    for (row, &y) in quantized.xq.chunks(d).zip(&quantized.yq) {
                        for (o, &v) in xty2.iter_mut().zip(row) {
                            *o += 2 * s * v as i128 * y as i128;
                        }
                    }
                    let xty2 = Some(xty2.iter().map(|&v| field.from_i128(v)).collect());
                    Backend::Field { storage, quantized, xty2 }
                }
            }
        };
        let digest = match &backend {
            Backend::Real { storage, .. } => digest(storage),
            Backend::Extended { storage, .. } => digest(storage),
            Backend::Field { storage, .. } => digest(storage),
        };
        Ok(Self { problem, config, k, threshold, backend, digest })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// Digest taken when the shares were encoded.
    pub fn storage_digest(&self) -> u64 {
        self.digest
    }

    /// Digest of the shares as they are now.
    pub fn current_digest(&self) -> u64 {
        match &self.backend {
            Backend::Real { storage, .. } => digest(storage),
            Backend::Extended { storage, .. } => digest(storage),
            Backend::Field { storage, .. } => digest(storage),
        }
    }

    /// Distance from worker `j`'s point to the data points, for breaking
    /// ties between simultaneous arrivals toward a better-conditioned decode.
    fn tie_rank(&self, j: usize) -> usize {
        if j < 1 {
            1 - j
        } else {
            j.saturating_sub(self.k)
        }
    }

    /// Workers the master decodes from, in arrival order, plus timing.
    fn wait_set(&self, rng: &mut ChaCha8Rng) -> Result<(Vec<usize>, f64, f64), RegressionError> {
        let n = self.config.n;
        let stragglers: BTreeSet<usize> = match &self.config.stragglers {
            StragglerPlan::Fixed(s) => s.clone(),
            StragglerPlan::Random(count) => {
                let mut pool: Vec<usize> = (0..n).collect();
                (0..(*count).min(n))
                    .map(|_| {
                        let i = rng.gen_range(0..pool.len());
                        pool.swap_remove(i)
                    })
                    .collect()
            }
        };
        let delay = self.config.delay;
        let mut arrivals: Vec<(f64, usize)> = Vec::with_capacity(n);
        for j in 0..n {
            let slow = delay.draw_slow(rng);
            if !stragglers.contains(&j) {
                arrivals.push((delay.finish_time(self.config.r, slow), j));
            }
        }
        let times: Vec<f64> = arrivals.iter().map(|a| a.0).collect();
        let wall = order_statistic(&times, self.threshold).ok_or(DecodeError::NotEnoughReturns {
            needed: self.threshold,
            got: arrivals.len(),
        })?;
        arrivals.sort_by(|a, b| a.0.total_cmp(&b.0).then(self.tie_rank(a.1).cmp(&self.tie_rank(b.1))).then(a.1.cmp(&b.1)));
        let used = arrivals.iter().take(self.threshold).map(|a| a.1).collect();
        Ok((used, wall, self.config.r as f64 * delay.unit_cost))
    }

    /// `sum_j |c_j| (sum_i |U_ij|)^2` for the real-mode decode over `used`.
    fn condition_estimate(&self, used: &[usize]) -> Result<f64, RegressionError> {
        let f = RealField;
        let points = regression_points(&f, self.k, self.config.n)?;
        let nodes: Vec<f64> = used.iter().map(|&j| points.alphas()[j]).collect();
        let mut c = alloc::vec![0.0; used.len()];
        for &b in points.data_betas() {
            if let Ok(w) = lagrange_weights(&f, &nodes, b) {
                for (ci, wi) in c.iter_mut().zip(w) {
                    *ci += wi;
                }
            }
        }
        let betas = points.data_betas();
        Ok(used
            .iter()
            .zip(&c)
            .map(|(&j, &cj)| {
                let a = points.alphas()[j];
                let col: f64 = lagrange_weights(&f, betas, a).map_or(0.0, |w| w.iter().map(|x| libm::fabs(*x)).sum());
                libm::fabs(cj) * col * col
            })
            .sum())
    }

    fn check_conditioning(&self, used: &[usize], iteration: usize, warnings: &mut Vec<Warning>) -> Result<(), RegressionError> {
        let est = self.condition_estimate(used)?;
        if est * self.config.precision.unit_roundoff() > self.config.tolerance {
            warnings.push(Warning::Conditioning { iteration, estimate: est });
        }
        Ok(())
    }

    fn relative_error(&self, g: &[f64], v: &[f64]) -> Result<f64, RegressionError> {
        let direct = gradient_direct(self.problem, v)?;
        let diff: Vec<f64> = g.iter().zip(&direct).map(|(a, b)| a - b).collect();
        let scale = norm(&direct);
        Ok(if scale == 0.0 { norm(&diff) } else { norm(&diff) / scale })
    }

    /// Coded gradient at `v`, plus the direct gradient it is checked against.
    fn coded_gradient(
        &self,
        v: &[f64],
        used: &[usize],
        iteration: usize,
        warnings: &mut Vec<Warning>,
    ) -> Result<(Vec<f64>, f64, bool), RegressionError> {
        match &self.backend {
            Backend::Real { storage, xty2 } => {
                self.check_conditioning(used, iteration, warnings)?;
                let mut w = v.to_vec();
                if xty2.is_none() {
                    w.push(-1.0);
                }
                let prod = storage.product(&w, used)?;
                let g: Vec<f64> = match xty2 {
                    Some(t) => prod.iter().zip(t).map(|(p, t)| 2.0 * p - t).collect(),
                    None => prod[..v.len()].iter().map(|p| 2.0 * p).collect(),
                };
                Ok((g.clone(), self.relative_error(&g, v)?, true))
            }
            Backend::Extended { storage, xty2 } => {
                self.check_conditioning(used, iteration, warnings)?;
                let mut w: Vec<Dd> = v.iter().map(|&x| Dd::from_f64(x)).collect();
                if xty2.is_none() {
                    w.push(Dd::from_f64(-1.0));
                }
                let prod = storage.product(&w, used)?;
                let g: Vec<f64> = match xty2 {
                    Some(t) => prod.iter().zip(t).map(|(p, t)| p.mul_f64(2.0).sub(*t).to_f64()).collect(),
                    None => prod[..v.len()].iter().map(|p| p.mul_f64(2.0).to_f64()).collect(),
                };
                Ok((g.clone(), self.relative_error(&g, v)?, true))
            }
            Backend::Field { storage, quantized, xty2 } => {
                let q = quantized.config;
                let vq = q.quantize(v)?;
                quantized.check_overflow(&vq)?;
                let f = &storage.field;
                let mut w = q.to_field(f, &vq);
                if xty2.is_none() {
                    w.push(f.neg(f.one()));
                }
                let prod = storage.product(&w, used)?;
                let g: Vec<i128> = (0..v.len())
                    .map(|i| {
                        let two_p = f.add(prod[i], prod[i]);
                        let gi = match xty2 {
                            Some(t) => f.sub(two_p, t[i]),
                            None => two_p,
                        };
                        f.to_signed(gi) as i128
                    })
                    .collect();
                let exact = g == quantized.gradient(&vq);
                Ok((q.dequantize(&g, 3), if exact { 0.0 } else { f64::INFINITY }, exact))
            }
        }
    }

    pub fn run(&self) -> Result<GdResult, RegressionError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let mut warnings = Vec::new();
        let mut records = Vec::with_capacity(self.config.iterations);
        let (w, losses) = descend(self.problem, &self.config, |it, v| {
            let (used, wall, comp) = self.wait_set(&mut rng)?;
            let (g, rel_error, exact) = self.coded_gradient(v, &used, it, &mut warnings)?;
            records.push(IterationRecord {
                iteration: it,
                loss: 0.0,
                rel_error,
                exact,
                used,
                wall_clock: wall,
                comm: wall - comp,
                comp,
            });
            Ok(g)
        })?;
        for (rec, loss) in records.iter_mut().zip(losses) {
            rec.loss = loss;
        }
        Ok(GdResult {
            initial_loss: self.problem.loss(&alloc::vec![0.0; self.problem.d]),
            w,
            threshold: self.threshold,
            lower_bound: regression_lower_bound(self.config.n, self.config.r),
            k: self.k,
            comm: records.iter().map(|r| r.comm).sum(),
            comp: records.iter().map(|r| r.comp).sum(),
            total: records.iter().map(|r| r.wall_clock).sum(),
            iterations: records,
            warnings,
        })
    }
}

fn default_step(problem: &RegressionProblem, config: &GdConfig) -> f64 {
    config.step.unwrap_or_else(|| 1.0 / problem.smoothness())
}

/// Nesterov iteration from `w = 0`, with `gradient(it, v)` supplying the
/// gradient at the look-ahead point. Returns the final weights and the loss
/// after every step.
fn descend(
    problem: &RegressionProblem,
    config: &GdConfig,
    mut gradient: impl FnMut(usize, &[f64]) -> Result<Vec<f64>, RegressionError>,
) -> Result<(Vec<f64>, Vec<f64>), RegressionError> {
    let step = default_step(problem, config);
    let mut w = alloc::vec![0.0; problem.d];
    let mut v = w.clone();
    let mut losses = Vec::with_capacity(config.iterations);
    for it in 0..config.iterations {
        let g = gradient(it, &v)?;
        let next: Vec<f64> = v.iter().zip(&g).map(|(vi, gi)| vi - step * gi).collect();
        v = next.iter().zip(&w).map(|(n, o)| n + config.momentum * (n - o)).collect();
        w = next;
        losses.push(problem.loss(&w));
    }
    Ok((w, losses))
}

/// Coded descent: setup then run.
pub fn lcc_gd(problem: &RegressionProblem, config: &GdConfig) -> Result<GdResult, RegressionError> {
    CodedRegression::setup(problem, config.clone())?.run()
}

/// The same descent with the gradient computed directly: by
/// [`gradient_direct`] for real mode, in exact integers on the quantized data for field mode.
pub fn uncoded_gd(problem: &RegressionProblem, config: &GdConfig) -> Result<Vec<f64>, RegressionError> {
    let quantized = match config.mode {
        Mode::Real => None,
        Mode::Field(q) => Some(problem.quantize(q)?),
    };
    descend(problem, config, |_, v| match &quantized {
        None => gradient_direct(problem, v),
        Some(qp) => {
            let vq = qp.config.quantize(v)?;
            qp.check_overflow(&vq)?;
            Ok(qp.config.dequantize(&qp.gradient(&vq), 3))
        }
    })
    .map(|(w, _)| w)
}
