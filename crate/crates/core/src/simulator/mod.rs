//! In-process worker pool driven by a virtual clock.
//!
//! A round encodes the dataset, lets every worker apply `f` to its share,
//! applies the fault plan (stragglers never return, adversaries return a
//! corrupted payload) and hands the master the returns in arrival order.
//! Randomness comes from one seed: stream 0 drives the master, stream
//! `j + 1` drives worker `j`.

mod timing;

pub use timing::{
    benchmark, benchmark_run, order_statistic, BenchConfig, BenchRun, DelayModel, Scheme, SchemeTiming,
};

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{build_matrix, encode, encode_repetition, CodecError, RandomPad};
use crate::field::{Field, PrimeField};
use crate::functions::{Block, ComputationSpec, FunctionError};
use crate::rsdecode::{decode, Evaluation};
use crate::scheme::{make_eval_points, RegionCheck, SchemeError, SchemeParams, Variant};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("parameters are infeasible for the chosen layout: {0}")]
    InfeasibleParams(RegionCheck),
    #[error("fault plan: {0}")]
    InvalidPlan(&'static str),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// How an adversary rewrites its honest payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Corruption {
    /// Every entry replaced by a fresh uniform element.
    RandomReplace,
    /// A nonzero random offset added to every entry.
    AdditiveOffset,
    /// The payload an honest worker would send for a different dataset
    /// encoded with the same padding, so corrupted symbols lie on another
    /// valid codeword.
    Targeted,
}

impl Corruption {
    pub const ALL: [Corruption; 3] = [Corruption::RandomReplace, Corruption::AdditiveOffset, Corruption::Targeted];
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FaultPlan {
    pub stragglers: BTreeSet<usize>,
    pub adversaries: BTreeSet<usize>,
    pub corruption: Corruption,
    pub delay: DelayModel,
}

impl Default for FaultPlan {
    fn default() -> Self {
        Self {
            stragglers: BTreeSet::new(),
            adversaries: BTreeSet::new(),
            corruption: Corruption::RandomReplace,
            delay: DelayModel::default(),
        }
    }
}

fn sample_ids<R: Rng + ?Sized>(rng: &mut R, pool: &mut Vec<usize>, count: usize) -> BTreeSet<usize> {
    (0..count.min(pool.len()))
        .map(|_| {
            let i = rng.gen_range(0..pool.len());
            pool.swap_remove(i)
        })
        .collect()
}

impl FaultPlan {
    /// `s` stragglers and `a` adversaries drawn uniformly without overlap.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        n: usize,
        s: usize,
        a: usize,
        corruption: Corruption,
        delay: DelayModel,
    ) -> Self {
        let mut pool: Vec<usize> = (0..n).collect();
        let stragglers = sample_ids(rng, &mut pool, s);
        let adversaries = sample_ids(rng, &mut pool, a);
        Self { stragglers, adversaries, corruption, delay }
    }

    /// Ids in range and the two sets disjoint. Budgets are not enforced here
    /// so that over-budget plans can be exercised.
    pub fn validate(&self, n: usize) -> Result<(), SimError> {
        if self.stragglers.iter().chain(&self.adversaries).any(|&j| j >= n) {
            return Err(SimError::InvalidPlan("worker id out of range"));
        }
        if !self.stragglers.is_disjoint(&self.adversaries) {
            return Err(SimError::InvalidPlan("a worker cannot be both straggler and adversary"));
        }
        Ok(())
    }

    pub fn within_budget(&self, params: &SchemeParams) -> bool {
        self.stragglers.len() <= params.s && self.adversaries.len() <= params.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WorkerStatus {
    Ok,
    Straggler,
    Adversarial,
}

/// Ground truth for one worker. Only `(worker, payload)` reaches the decoder.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorkerReturn<E> {
    pub worker: usize,
    pub payload: Option<Block<E>>,
    pub status: WorkerStatus,
    /// Virtual arrival time; `None` for stragglers.
    pub arrival: Option<f64>,
}

impl<E: Clone> WorkerReturn<E> {
    pub fn evaluation(&self) -> Option<Evaluation<E>> {
        self.payload.as_ref().map(|p| Evaluation { worker: self.worker, payload: p.clone() })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundReport<E> {
    pub variant: Variant,
    /// Empty when decoding failed.
    pub decoded: Vec<Block<E>>,
    /// Virtual time at which the last consumed return arrived.
    pub wall_clock: f64,
    pub waited_for: usize,
    pub corrected_ids: BTreeSet<usize>,
    pub matches: bool,
    pub within_budget: bool,
    pub failure: Option<String>,
}

fn check_region(params: &SchemeParams) -> Result<(), SimError> {
    let region = params.region();
    let ok = match params.variant {
        Variant::Lagrange => region.lagrange_ok(),
        Variant::UncodedRepetition => region.repetition_ok(),
    };
    if ok {
        Ok(())
    } else {
        Err(SimError::InfeasibleParams(region))
    }
}

fn corrupt<F: Field>(
    field: &F,
    rule: Corruption,
    honest: &Block<F::Elem>,
    targeted: Option<&Block<F::Elem>>,
    rng: &mut ChaCha8Rng,
) -> Block<F::Elem> {
    match rule {
        Corruption::RandomReplace => honest.iter().map(|_| field.random(rng)).collect(),
        Corruption::AdditiveOffset => honest
            .iter()
            .map(|&v| {
                let mut off = field.random(rng);
                while field.is_zero(off) {
                    off = field.random(rng);
                }
                field.add(v, off)
            })
            .collect(),
        Corruption::Targeted => targeted.cloned().unwrap_or_else(|| honest.clone()),
    }
}

/// Encodes, evaluates and applies the fault plan. Returns one entry per
/// worker, sorted by arrival (stragglers last, by id).
pub fn execute_workers<F: Field>(
    field: &F,
    params: &SchemeParams,
    spec: &ComputationSpec<F>,
    data: &[Block<F::Elem>],
    plan: &FaultPlan,
    seed: u64,
) -> Result<Vec<WorkerReturn<F::Elem>>, SimError> {
    check_region(params)?;
    plan.validate(params.n)?;
    let points = make_eval_points(field, params)?;
    let m = data.first().map_or(0, |b| b.len());
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let pad = RandomPad::generate(field, params.t, m, master.next_u64());

    let shares = match params.variant {
        Variant::Lagrange => encode(field, data, &pad, &build_matrix(field, &points))?,
        Variant::UncodedRepetition => encode_repetition(data, &points)?,
    };
    let alternate = if plan.corruption == Corruption::Targeted && !plan.adversaries.is_empty() {
        let other: Vec<Block<F::Elem>> = data
            .iter()
            .map(|b| b.iter().map(|_| field.random(&mut master)).collect())
            .collect();
        let alt = match params.variant {
            Variant::Lagrange => encode(field, &other, &pad, &build_matrix(field, &points))?,
            Variant::UncodedRepetition => encode_repetition(&other, &points)?,
        };
        Some(alt)
    } else {
        None
    };

    let mut out = Vec::with_capacity(params.n);
    for (j, share) in shares.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64 + 1);
        let slow = plan.delay.draw_slow(&mut rng);
        if plan.stragglers.contains(&j) {
            out.push(WorkerReturn { worker: j, payload: None, status: WorkerStatus::Straggler, arrival: None });
            continue;
        }
        let honest = spec.eval(field, share)?;
        let arrival = Some(plan.delay.finish_time(1, slow));
        let (payload, status) = if plan.adversaries.contains(&j) {
            let target = match &alternate {
                Some(alt) => Some(spec.eval(field, &alt[j])?),
                None => None,
            };
            (corrupt(field, plan.corruption, &honest, target.as_ref(), &mut rng), WorkerStatus::Adversarial)
        } else {
            (honest, WorkerStatus::Ok)
        };
        out.push(WorkerReturn { worker: j, payload: Some(payload), status, arrival });
    }
    out.sort_by(|a, b| match (a.arrival, b.arrival) {
        (Some(x), Some(y)) => x.total_cmp(&y).then(a.worker.cmp(&b.worker)),
        (Some(_), None) => core::cmp::Ordering::Less,
        (None, Some(_)) => core::cmp::Ordering::Greater,
        (None, None) => a.worker.cmp(&b.worker),
    });
    Ok(out)
}

/// One full round: workers, decoding, comparison with direct evaluation.
pub fn run_round<F: Field>(
    field: &F,
    params: &SchemeParams,
    spec: &ComputationSpec<F>,
    data: &[Block<F::Elem>],
    plan: &FaultPlan,
    seed: u64,
) -> Result<RoundReport<F::Elem>, SimError> {
    let returns = execute_workers(field, params, spec, data, plan, seed)?;
    let points = make_eval_points(field, params)?;
    let arrivals: Vec<Evaluation<F::Elem>> = returns.iter().filter_map(|r| r.evaluation()).collect();
    let arrival_of = |w: usize| returns.iter().find(|r| r.worker == w).and_then(|r| r.arrival);
    let truth: Vec<Block<F::Elem>> = data.iter().map(|x| spec.eval(field, x)).collect::<Result<_, _>>()?;
    let within_budget = plan.within_budget(params);
    let report = match decode(field, &arrivals, &points, params) {
        Ok(d) => RoundReport {
            variant: params.variant,
            matches: d.blocks == truth,
            wall_clock: d.used.iter().filter_map(|&w| arrival_of(w)).fold(0.0, f64::max),
            waited_for: d.used.len(),
            corrected_ids: d.corrected,
            decoded: d.blocks,
            within_budget,
            failure: None,
        },
        Err(e) => RoundReport {
            variant: params.variant,
            decoded: Vec::new(),
            wall_clock: returns.iter().filter_map(|r| r.arrival).fold(0.0, f64::max),
            waited_for: arrivals.len(),
            corrected_ids: BTreeSet::new(),
            matches: false,
            within_budget,
            failure: Some(e.to_string()),
        },
    };
    Ok(report)
}

/// The computation used for degree `d` in sweeps, with its block length.
pub fn sweep_spec(d: usize) -> (ComputationSpec<PrimeField>, usize) {
    match d {
        1 => (ComputationSpec::identity(), 2),
        2 => (ComputationSpec::square(), 2),
        _ => (ComputationSpec::monomial(d).expect("positive arity"), d),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub a: usize,
    pub t: usize,
    pub deg: usize,
    /// `None` when both region inequalities fail.
    pub variant: Option<Variant>,
    pub trials: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepConfig {
    pub max_n: usize,
    pub max_k: usize,
    pub degrees: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

/// Runs `trials` randomized rounds at full budget for one tuple. Corruption
/// rules rotate through every mode; delays are randomized so arrival order
/// varies.
pub fn sweep_tuple(field: &PrimeField, params: &SchemeParams, trials: usize, seed: u64) -> Result<usize, SimError> {
    let (spec, m) = sweep_spec(params.deg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let delay = DelayModel { base_latency: 0.0, unit_cost: 1.0, slow_prob: 0.5, slow_secs: 1.0 };
    for trial in 0..trials {
        let data: Vec<Block<_>> = (0..params.k).map(|_| (0..m).map(|_| field.random(&mut rng)).collect()).collect();
        let corruption = Corruption::ALL[trial % 3];
        let plan = FaultPlan::random(&mut rng, params.n, params.s, params.a, corruption, delay);
        let report = run_round(field, params, &spec, &data, &plan, rng.next_u64())?;
        if !report.matches {
            failures += 1;
        }
    }
    Ok(failures)
}

/// Every tuple with `N <= max_n`, `K <= max_k`, `d` in `degrees` and
/// `S + A + T <= N`. Infeasible tuples are listed with no trials.
pub fn sweep_region(field: &PrimeField, cfg: &SweepConfig) -> Result<Vec<SweepRow>, SimError> {
    let mut rows = Vec::new();
    let mut tuple_seed = ChaCha8Rng::seed_from_u64(cfg.seed);
    for n in 1..=cfg.max_n {
        for k in 1..=cfg.max_k {
            for &deg in &cfg.degrees {
                for t in 0..=n {
                    for a in 0..=n - t {
                        for s in 0..=n - t - a {
                            let seed = tuple_seed.next_u64();
                            let mut row = SweepRow { n, k, s, a, t, deg, variant: None, trials: 0, failures: 0 };
                            if let Ok(params) = SchemeParams::plan(n, k, s, a, t, deg) {
                                row.variant = Some(params.variant);
                                row.trials = cfg.trials;
                                row.failures = sweep_tuple(field, &params, cfg.trials, seed)?;
                            }
                            rows.push(row);
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use alloc::vec;

    fn f11() -> PrimeField {
        PrimeField::new(11).unwrap()
    }

    fn random_data(f: &PrimeField, k: usize, m: usize, seed: u64) -> Vec<Block<Fp>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..k).map(|_| (0..m).map(|_| f.random(&mut rng)).collect()).collect()
    }

    #[test]
    fn worked_example_round() {
        let f = f11();
        let params = SchemeParams::plan(8, 2, 1, 1, 1, 2).unwrap();
        let data = random_data(&f, 2, 3, 4);
        let plan = FaultPlan {
            stragglers: BTreeSet::from([5]),
            adversaries: BTreeSet::from([2]),
            ..FaultPlan::default()
        };
        let r = run_round(&f, &params, &ComputationSpec::square(), &data, &plan, 11).unwrap();
        assert!(r.matches, "{r:?}");
        assert_eq!(r.waited_for, 7);
        assert!(r.within_budget);
    }

    #[test]
    fn repetition_round_without_faults() {
        let f = f11();
        let params = SchemeParams::with_variant(5, 2, 0, 0, 0, 1, Variant::UncodedRepetition).unwrap();
        let data = random_data(&f, 2, 2, 1);
        let r = run_round(&f, &params, &ComputationSpec::identity(), &data, &FaultPlan::default(), 3).unwrap();
        assert!(r.matches);
        assert_eq!(r.waited_for, 2);
        assert_eq!(r.decoded, data);
    }

    #[test]
    fn over_budget_is_caught() {
        let f = PrimeField::new(127).unwrap();
        let params = SchemeParams::plan(8, 2, 1, 1, 1, 2).unwrap();
        let mut caught = 0;
        for seed in 0..30 {
            let data = random_data(&f, 2, 2, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let plan = FaultPlan::random(&mut rng, 8, 1, 2, Corruption::ALL[seed as usize % 3], DelayModel::default());
            let r = run_round(&f, &params, &ComputationSpec::square(), &data, &plan, seed).unwrap();
            assert!(!r.within_budget);
            if !r.matches {
                caught += 1;
            }
        }
        assert_eq!(caught, 30);
    }

    #[test]
    fn decode_time_is_order_statistic() {
        let f = PrimeField::new(127).unwrap();
        let params = SchemeParams::plan(12, 2, 2, 1, 1, 2).unwrap();
        let data = random_data(&f, 2, 2, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let delay = DelayModel { base_latency: 0.1, unit_cost: 0.01, slow_prob: 0.4, slow_secs: 0.5 };
        let plan = FaultPlan::random(&mut rng, 12, 2, 1, Corruption::AdditiveOffset, delay);
        let returns = execute_workers(&f, &params, &ComputationSpec::square(), &data, &plan, 99).unwrap();
        let times: Vec<f64> = returns.iter().filter_map(|r| r.arrival).collect();
        assert_eq!(times.len(), 10);
        let r = run_round(&f, &params, &ComputationSpec::square(), &data, &plan, 99).unwrap();
        let need = params.composition_degree() + 2 * params.a + 1;
        assert_eq!(r.waited_for, need);
        assert_eq!(Some(r.wall_clock), order_statistic(&times, need));
        assert!(r.matches);
    }

    #[test]
    fn statuses_are_ground_truth() {
        let f = f11();
        let params = SchemeParams::plan(8, 2, 1, 1, 1, 2).unwrap();
        let data = random_data(&f, 2, 1, 0);
        let plan = FaultPlan {
            stragglers: BTreeSet::from([0]),
            adversaries: BTreeSet::from([7]),
            corruption: Corruption::AdditiveOffset,
            ..FaultPlan::default()
        };
        let returns = execute_workers(&f, &params, &ComputationSpec::square(), &data, &plan, 1).unwrap();
        let status = |w| returns.iter().find(|r| r.worker == w).unwrap().status;
        assert_eq!(status(0), WorkerStatus::Straggler);
        assert_eq!(status(7), WorkerStatus::Adversarial);
        assert_eq!(status(3), WorkerStatus::Ok);
        assert!(returns.last().unwrap().payload.is_none());
    }

    #[test]
    fn rounds_are_deterministic() {
        let f = PrimeField::new(127).unwrap();
        let params = SchemeParams::plan(10, 2, 1, 1, 1, 2).unwrap();
        let data = random_data(&f, 2, 4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let plan = FaultPlan::random(&mut rng, 10, 1, 1, Corruption::Targeted, DelayModel::injected());
        let a = run_round(&f, &params, &ComputationSpec::square(), &data, &plan, 5).unwrap();
        let b = run_round(&f, &params, &ComputationSpec::square(), &data, &plan, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_plans_rejected() {
        let f = f11();
        let params = SchemeParams::plan(8, 2, 1, 1, 1, 2).unwrap();
        let data = random_data(&f, 2, 1, 0);
        let overlap = FaultPlan {
            stragglers: BTreeSet::from([1]),
            adversaries: BTreeSet::from([1]),
            ..FaultPlan::default()
        };
        assert!(matches!(
            run_round(&f, &params, &ComputationSpec::square(), &data, &overlap, 0),
            Err(SimError::InvalidPlan(_))
        ));
        let bad = SchemeParams { n: 7, ..params };
        assert!(matches!(
            run_round(&f, &bad, &ComputationSpec::square(), &data, &FaultPlan::default(), 0),
            Err(SimError::InfeasibleParams(_))
        ));
    }

    #[test]
    fn sweep_rows_for_named_tuples() {
        let f = PrimeField::new(127).unwrap();
        let cfg = SweepConfig { max_n: 8, max_k: 3, degrees: vec![1, 2], trials: 4, seed: 0 };
        let rows = sweep_region(&f, &cfg).unwrap();
        let find = |n, k, s, a, t, deg| {
            rows.iter()
                .find(|r| (r.n, r.k, r.s, r.a, r.t, r.deg) == (n, k, s, a, t, deg))
                .unwrap()
                .clone()
        };
        let r = find(8, 2, 1, 1, 1, 2);
        assert_eq!((r.variant, r.failures, r.trials), (Some(Variant::Lagrange), 0, 4));
        let r = find(4, 3, 0, 0, 0, 2);
        assert_eq!((r.variant, r.failures), (Some(Variant::UncodedRepetition), 0));
        let r = find(2, 3, 0, 0, 0, 1);
        assert_eq!((r.variant, r.trials), (None, 0));
        assert!(rows.iter().all(|r| r.failures == 0));
    }
}
