//! Virtual clock. Nothing here sleeps: a worker's finishing time is
//! `base_latency + units * unit_cost`, plus `slow_secs` with probability
//! `slow_prob`. All numbers are synthetic.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scheme::{regression_lower_bound, regression_threshold};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DelayModel {
    /// Fixed per-return latency, seconds.
    pub base_latency: f64,
    /// Seconds per unit of work (one partition's worth of evaluation).
    pub unit_cost: f64,
    pub slow_prob: f64,
    pub slow_secs: f64,
}

impl Default for DelayModel {
    fn default() -> Self {
        Self { base_latency: 0.0, unit_cost: 0.002, slow_prob: 0.0, slow_secs: 0.0 }
    }
}

impl DelayModel {
    /// 5% of workers held up by half a second.
    pub fn injected() -> Self {
        Self { slow_prob: 0.05, slow_secs: 0.5, ..Self::default() }
    }

    pub fn with_injection(self, slow_prob: f64, slow_secs: f64) -> Self {
        Self { slow_prob, slow_secs, ..self }
    }

    /// One Bernoulli draw; `rng` is consumed identically whatever the outcome.
    pub fn draw_slow<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        let x: f64 = rng.gen();
        x < self.slow_prob
    }

    pub fn finish_time(&self, units: usize, slow: bool) -> f64 {
        let extra = if slow { self.slow_secs } else { 0.0 };
        self.base_latency + units as f64 * self.unit_cost + extra
    }
}

/// `k`-th smallest (1-based) of `times`.
pub fn order_statistic(times: &[f64], k: usize) -> Option<f64> {
    if k == 0 || k > times.len() {
        return None;
    }
    let mut sorted = times.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(sorted[k - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Scheme {
    /// `n` partitions on `n` workers; wait for all of them.
    Uncoded,
    /// `ceil(n/r)` blocks of `r` partitions replicated round-robin; wait until
    /// every block has one return.
    Repetition,
    /// `ceil(n/r)` blocks Lagrange-coded; wait for the `2 ceil(n/r) - 1`
    /// fastest.
    Lagrange,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Uncoded, Scheme::Repetition, Scheme::Lagrange];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Uncoded => "uncoded",
            Scheme::Repetition => "repetition",
            Scheme::Lagrange => "lagrange",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BenchConfig {
    pub n: usize,
    pub r: usize,
    /// Gradient iterations per run; totals are summed over them.
    pub iterations: usize,
    pub delay: DelayModel,
}

/// Totals for one scheme over one run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SchemeTiming {
    pub scheme: Scheme,
    pub comm: f64,
    pub comp: f64,
    pub total: f64,
    /// Returns the master waits for per iteration.
    pub waited_for: usize,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BenchRun {
    pub seed: u64,
    pub lower_bound: usize,
    pub timings: Vec<SchemeTiming>,
}

impl BenchRun {
    pub fn get(&self, scheme: Scheme) -> &SchemeTiming {
        self.timings.iter().find(|t| t.scheme == scheme).expect("all schemes timed")
    }
}

/// Time at which the master can stop waiting, given per-worker finish times.
fn stop_time(scheme: Scheme, times: &[f64], blocks: usize) -> f64 {
    match scheme {
        Scheme::Uncoded => times.iter().copied().fold(0.0, f64::max),
        Scheme::Lagrange => order_statistic(times, 2 * blocks - 1).unwrap_or(f64::INFINITY),
        Scheme::Repetition => (0..blocks)
            .map(|b| {
                times
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| j % blocks == b)
                    .map(|(_, &t)| t)
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max),
    }
}

/// One run of `iterations` rounds. Every scheme sees the same slowdown draws.
pub fn benchmark_run(cfg: &BenchConfig, seed: u64) -> BenchRun {
    let n = cfg.n;
    let blocks = n.div_ceil(cfg.r.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut timings: Vec<SchemeTiming> = Scheme::ALL
        .iter()
        .map(|&scheme| SchemeTiming {
            scheme,
            comm: 0.0,
            comp: 0.0,
            total: 0.0,
            waited_for: match scheme {
                Scheme::Uncoded => n,
                Scheme::Repetition => blocks,
                Scheme::Lagrange => regression_threshold(n, cfg.r),
            },
            workers: n,
        })
        .collect();
    let mut slow = alloc::vec![false; n];
    for _ in 0..cfg.iterations {
        for s in slow.iter_mut() {
            *s = cfg.delay.draw_slow(&mut rng);
        }
        for timing in timings.iter_mut() {
            let units = if timing.scheme == Scheme::Uncoded { 1 } else { cfg.r };
            let times: Vec<f64> = slow.iter().map(|&s| cfg.delay.finish_time(units, s)).collect();
            let stop = stop_time(timing.scheme, &times, blocks);
            let comp = units as f64 * cfg.delay.unit_cost;
            timing.total += stop;
            timing.comp += comp;
            timing.comm += stop - comp;
        }
    }
    BenchRun { seed, lower_bound: regression_lower_bound(n, cfg.r), timings }
}

/// `runs` independent runs seeded `seed, seed + 1, …`.
pub fn benchmark(cfg: &BenchConfig, runs: usize, seed: u64) -> Vec<BenchRun> {
    (0..runs as u64).map(|i| benchmark_run(cfg, seed.wrapping_add(i))).collect()
}
