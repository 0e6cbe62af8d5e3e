//! One driver per subcommand.

use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use lcc_core::codec::{build_matrix, encode, encode_repetition};
use lcc_core::field::{is_prime, Field, Fp, PrimeField};
use lcc_core::functions::{Block, ComputationSpec};
use lcc_core::privacy::{audit_mds, for_each_subset, measure_mi_exhaustive, MdsAudit, PrivacyError};
use lcc_core::regression::{
    lcc_gd, GdConfig, IterationRecord, Mode, QuantizationConfig, RegressionError, RegressionProblem, StragglerPlan,
    Warning,
};
use lcc_core::scheme::{make_eval_points, Feasibility, RegionCheck, SchemeError, SchemeParams};
use lcc_core::simulator::{
    benchmark, run_round, sweep_region, sweep_spec, BenchConfig, Corruption, FaultPlan, Scheme, SweepConfig, SweepRow,
};
use lcc_core::{RandomPad, Variant};

use crate::config::{Command, ModeKind, RunConfig, SpecKind};
use crate::report::{id_list, read_numeric_csv, write_csv, write_json};
use crate::shares::ShareFile;
use crate::CliError;

/// What a finished subcommand prints and where its reports went.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let command = cfg.command.ok_or_else(|| CliError::Usage("no subcommand given".into()))?;
    match command {
        Command::Plan => plan(cfg),
        Command::Encode => encode_cmd(cfg),
        Command::Simulate => simulate(cfg),
        Command::Sweep => sweep(cfg),
        Command::AuditPrivacy => audit_privacy(cfg),
        Command::Regress => regress(cfg),
        Command::Bench => bench(cfg),
    }
}

fn region(cfg: &RunConfig) -> RegionCheck {
    let s = &cfg.scheme;
    RegionCheck::new(s.n, s.k, s.s, s.a, s.t, s.deg)
}

fn cmp(need: usize, n: usize) -> &'static str {
    if need <= n {
        "≤"
    } else {
        ">"
    }
}

/// The verdict line followed by both inequalities, evaluated.
pub fn plan_lines(check: &RegionCheck) -> Vec<String> {
    let n = check.n;
    let verdict = match check.verdict() {
        Feasibility::Lagrange => format!("feasible: lagrange ({} ≤ {n})", check.lagrange_expr()),
        Feasibility::UncodedRepetition => format!(
            "feasible: uncoded_repetition ({} ≤ {n}; lagrange needs {} > {n})",
            check.repetition_expr(),
            check.lagrange_need
        ),
        Feasibility::Infeasible => {
            format!("infeasible ({} > {n}; uncoded needs {} > {n})", check.lagrange_need, check.repetition_expr())
        }
    };
    vec![
        verdict,
        format!("  lagrange: {} {} {n}", check.lagrange_expr(), cmp(check.lagrange_need, n)),
        format!("  uncoded:  {} {} {n}", check.repetition_expr(), cmp(check.repetition_need, n)),
    ]
}

fn scheme_params(cfg: &RunConfig) -> Result<SchemeParams, CliError> {
    let s = &cfg.scheme;
    SchemeParams::plan(s.n, s.k, s.s, s.a, s.t, s.deg).map_err(|e| match e {
        SchemeError::Infeasible(check) => CliError::Infeasible(plan_lines(&check).join("\n")),
        other => CliError::Usage(other.to_string()),
    })
}

/// `--modulus` if given, else the smallest prime that fits the points.
fn field_for(cfg: &RunConfig, params: &SchemeParams) -> Result<PrimeField, CliError> {
    let p = match cfg.modulus {
        Some(p) => p,
        None => (params.min_field_order().max(2)..).find(|&v| is_prime(v)).expect("primes are unbounded"),
    };
    let field = PrimeField::new(p).map_err(|e| CliError::Usage(format!("--modulus {p}: {e}")))?;
    if p < params.min_field_order() {
        return Err(CliError::Usage(format!("--modulus {p}: need at least {} distinct points", params.min_field_order())));
    }
    Ok(field)
}

#[derive(Serialize)]
struct PlanReport<'a> {
    config: &'a RunConfig,
    verdict: Feasibility,
    region: RegionCheck,
    lines: Vec<String>,
    /// Returns the decoder waits for, `deg·(K+T−1) + 2A + 1`; absent when
    /// infeasible.
    decode_budget: Option<usize>,
    min_field_order: Option<u64>,
}

fn plan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let check = region(cfg);
    let params = match scheme_params(cfg) {
        Ok(p) => Some(p),
        Err(CliError::Infeasible(_)) => None,
        Err(e) => return Err(e),
    };
    let lines = plan_lines(&check);
    let report = PlanReport {
        config: cfg,
        verdict: check.verdict(),
        region: check,
        lines: lines.clone(),
        decode_budget: params.map(|p| p.decode_budget()),
        min_field_order: params.map(|p| p.min_field_order()),
    };
    let file = write_json(&cfg.out_dir(), "plan.json", &report)?;
    if params.is_none() {
        return Err(CliError::Infeasible(lines.join("\n")));
    }
    Ok(Outcome { lines, files: vec![file] })
}

fn random_data(field: &PrimeField, k: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Block<Fp>> {
    (0..k).map(|_| (0..m).map(|_| field.random(rng)).collect()).collect()
}

/// `K` rows of `M` integers, reduced mod `p`.
fn read_dataset(cfg: &RunConfig, field: &PrimeField, k: usize) -> Result<Option<Vec<Block<Fp>>>, CliError> {
    let Some(path) = &cfg.input else { return Ok(None) };
    let rows: Vec<Vec<i128>> = read_numeric_csv(path)?;
    if rows.len() != k {
        return Err(CliError::Format(format!("{}: {} rows, expected K = {k}", path.display(), rows.len())));
    }
    Ok(Some(rows.iter().map(|r| r.iter().map(|&v| field.from_i128(v)).collect()).collect()))
}

#[derive(Serialize)]
struct Randomness {
    /// Field elements the encoder sampled.
    drawn: usize,
    /// `T·M`.
    lagrange: usize,
    /// `K·T·M` for sharing every block separately.
    per_block_sharing: usize,
}

#[derive(Serialize)]
struct EncodeReport<'a> {
    config: &'a RunConfig,
    variant: Variant,
    modulus: u64,
    block_len: usize,
    betas: Vec<u64>,
    alphas: Vec<u64>,
    randomness: Randomness,
    share_files: Vec<String>,
}

#[derive(Serialize)]
struct ShareDump {
    modulus: u64,
    k: usize,
    t: usize,
    /// Rows of `U`, `(K+T) × N`; empty for repetition.
    encoding_matrix: Vec<Vec<u64>>,
    shares: Vec<ShareFile>,
}

fn encode_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = scheme_params(cfg)?;
    let field = field_for(cfg, &params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let data = match read_dataset(cfg, &field, params.k)? {
        Some(d) => d,
        None => random_data(&field, params.k, cfg.block_len, &mut rng),
    };
    let m = data[0].len();
    let points = make_eval_points(&field, &params).map_err(CliError::compute)?;
    let (shares, pad, u) = match params.variant {
        Variant::Lagrange => {
            let u = build_matrix(&field, &points);
            let pad = RandomPad::generate(&field, params.t, m, rng.next_u64());
            let shares = encode(&field, &data, &pad, &u).map_err(CliError::compute)?;
            let rows = (0..params.k + params.t).map(|i| (0..params.n).map(|j| u.get(i, j).value()).collect()).collect();
            (shares, pad, rows)
        }
        Variant::UncodedRepetition => {
            (encode_repetition(&data, &points).map_err(CliError::compute)?, RandomPad::none(), Vec::new())
        }
    };
    let out = cfg.out_dir();
    let share_dir = out.join("shares");
    std::fs::create_dir_all(&share_dir).map_err(|e| CliError::Io(share_dir.clone(), e))?;
    let files: Vec<ShareFile> = shares
        .iter()
        .enumerate()
        .map(|(j, s)| ShareFile::new(&field, j, points.alphas()[j], s))
        .collect();
    let mut names = Vec::new();
    for f in &files {
        let name = format!("worker_{:03}.bin", f.worker);
        f.save(&share_dir.join(&name))?;
        names.push(format!("shares/{name}"));
    }
    let dump = ShareDump { modulus: field.modulus(), k: params.k, t: params.t, encoding_matrix: u, shares: files };
    let dump_file = write_json(&out, "shares.json", &dump)?;
    let report = EncodeReport {
        config: cfg,
        variant: params.variant,
        modulus: field.modulus(),
        block_len: m,
        betas: points.betas().iter().map(|v| v.value()).collect(),
        alphas: points.alphas().iter().map(|v| v.value()).collect(),
        randomness: Randomness {
            drawn: pad.elements_drawn(),
            lagrange: params.t * m,
            per_block_sharing: params.k * params.t * m,
        },
        share_files: names,
    };
    let file = write_json(&out, "encode.json", &report)?;
    let lines = vec![
        format!("encoded {} blocks of {m} over F_{} into {} shares ({:?})", params.k, field.modulus(), params.n, params.variant),
        format!(
            "random elements drawn: {} (T·M = {}; per-block sharing would need K·T·M = {})",
            report.randomness.drawn, report.randomness.lagrange, report.randomness.per_block_sharing
        ),
    ];
    Ok(Outcome { lines, files: vec![file, dump_file] })
}

/// The computation for `simulate`, checked against `deg` and `M`.
fn simulate_spec(cfg: &RunConfig) -> Result<(ComputationSpec<PrimeField>, usize), CliError> {
    let deg = cfg.scheme.deg;
    let m = cfg.block_len;
    let (spec, m) = match cfg.spec {
        None => {
            let (spec, min_m) = sweep_spec(deg);
            (spec, m.max(min_m).next_multiple_of(min_m))
        }
        Some(SpecKind::Identity) => (ComputationSpec::identity(), m),
        Some(SpecKind::Square) => (ComputationSpec::square(), m),
        Some(SpecKind::Monomial) => {
            (ComputationSpec::monomial(deg).map_err(CliError::compute)?, m.max(deg).next_multiple_of(deg))
        }
        Some(SpecKind::Bilinear) => {
            let side = (1..=m).find(|s| 2 * s * s >= m).unwrap_or(1);
            (ComputationSpec::bilinear(side, side, side).map_err(CliError::compute)?, 2 * side * side)
        }
    };
    if spec.degree() != deg {
        return Err(CliError::Usage(format!("--spec {} has degree {}, but --deg is {deg}", spec.name(), spec.degree())));
    }
    Ok((spec, m))
}

#[derive(Serialize)]
struct RoundRow {
    trial: usize,
    corruption: String,
    stragglers: String,
    adversaries: String,
    waited_for: usize,
    wall_clock: f64,
    corrected: String,
    matches: bool,
    failure: String,
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    config: &'a RunConfig,
    variant: Variant,
    modulus: u64,
    spec: String,
    block_len: usize,
    trials: usize,
    mismatches: usize,
    adversaries_caught: usize,
    mean_wall_clock: f64,
}

fn corruption_name(c: Corruption) -> &'static str {
    match c {
        Corruption::RandomReplace => "random_replace",
        Corruption::AdditiveOffset => "additive_offset",
        Corruption::Targeted => "targeted",
    }
}

fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = scheme_params(cfg)?;
    let field = field_for(cfg, &params)?;
    let (spec, m) = simulate_spec(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let delay = cfg.delay.model();
    let mut rows = Vec::with_capacity(cfg.trials);
    let mut caught = 0;
    for trial in 0..cfg.trials {
        let data = random_data(&field, params.k, m, &mut rng);
        let corruption = cfg.corruption.unwrap_or(Corruption::ALL[trial % Corruption::ALL.len()]);
        let plan = FaultPlan::random(&mut rng, params.n, params.s, params.a, corruption, delay);
        let r = run_round(&field, &params, &spec, &data, &plan, rng.next_u64()).map_err(CliError::compute)?;
        caught += r.corrected_ids.intersection(&plan.adversaries).count();
        rows.push(RoundRow {
            trial,
            corruption: corruption_name(corruption).into(),
            stragglers: id_list(&plan.stragglers),
            adversaries: id_list(&plan.adversaries),
            waited_for: r.waited_for,
            wall_clock: r.wall_clock,
            corrected: id_list(&r.corrected_ids),
            matches: r.matches,
            failure: r.failure.unwrap_or_default(),
        });
    }
    let mismatches = rows.iter().filter(|r| !r.matches).count();
    let mean = rows.iter().map(|r| r.wall_clock).sum::<f64>() / rows.len().max(1) as f64;
    let out = cfg.out_dir();
    let csv = write_csv(&out, "simulate.csv", &rows)?;
    let report = SimulateReport {
        config: cfg,
        variant: params.variant,
        modulus: field.modulus(),
        spec: spec.name().into(),
        block_len: m,
        trials: cfg.trials,
        mismatches,
        adversaries_caught: caught,
        mean_wall_clock: mean,
    };
    let json = write_json(&out, "simulate.json", &report)?;
    let lines = vec![format!(
        "{} trials over F_{} ({:?}, {}): {mismatches} mismatches, {caught} corrupted returns corrected",
        cfg.trials,
        field.modulus(),
        params.variant,
        spec.name()
    )];
    Ok(Outcome { lines, files: vec![json, csv] })
}

#[derive(Serialize)]
struct SweepCsvRow {
    n: usize,
    k: usize,
    s: usize,
    a: usize,
    t: usize,
    deg: usize,
    variant: String,
    trials: usize,
    failures: usize,
}

impl From<&SweepRow> for SweepCsvRow {
    fn from(r: &SweepRow) -> Self {
        let variant = match r.variant {
            Some(Variant::Lagrange) => "lagrange",
            Some(Variant::UncodedRepetition) => "uncoded_repetition",
            None => "infeasible",
        };
        Self { n: r.n, k: r.k, s: r.s, a: r.a, t: r.t, deg: r.deg, variant: variant.into(), trials: r.trials, failures: r.failures }
    }
}

#[derive(Serialize)]
struct SweepReport<'a> {
    config: &'a RunConfig,
    modulus: u64,
    tuples: usize,
    lagrange: usize,
    uncoded_repetition: usize,
    infeasible: usize,
    trials: usize,
    failures: usize,
}

fn sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.modulus.unwrap_or(127);
    let field = PrimeField::new(p).map_err(|e| CliError::Usage(format!("--modulus {p}: {e}")))?;
    let needed = (cfg.sweep.max_n + cfg.sweep.max_k + cfg.sweep.max_n) as u64;
    if p < needed {
        return Err(CliError::Usage(format!("--modulus {p}: the sweep needs at least {needed}")));
    }
    let sc = SweepConfig {
        max_n: cfg.sweep.max_n,
        max_k: cfg.sweep.max_k,
        degrees: (1..=cfg.sweep.max_deg).collect(),
        trials: cfg.sweep.trials,
        seed: cfg.seed,
    };
    let rows = sweep_region(&field, &sc).map_err(CliError::compute)?;
    let count = |v: Option<Variant>| rows.iter().filter(|r| r.variant == v).count();
    let report = SweepReport {
        config: cfg,
        modulus: p,
        tuples: rows.len(),
        lagrange: count(Some(Variant::Lagrange)),
        uncoded_repetition: count(Some(Variant::UncodedRepetition)),
        infeasible: count(None),
        trials: rows.iter().map(|r| r.trials).sum(),
        failures: rows.iter().map(|r| r.failures).sum(),
    };
    let out = cfg.out_dir();
    let csv_rows: Vec<SweepCsvRow> = rows.iter().map(SweepCsvRow::from).collect();
    let csv = write_csv(&out, "sweep.csv", &csv_rows)?;
    let json = write_json(&out, "sweep.json", &report)?;
    let lines = vec![format!(
        "{} tuples: {} lagrange, {} uncoded repetition, {} infeasible; {} trials, {} decode mismatches",
        report.tuples, report.lagrange, report.uncoded_repetition, report.infeasible, report.trials, report.failures
    )];
    Ok(Outcome { lines, files: vec![json, csv] })
}

#[derive(Serialize)]
struct PrivacyReport<'a> {
    config: &'a RunConfig,
    modulus: u64,
    /// `"pass"` or `"fail"`.
    mds: &'static str,
    subsets_checked: u64,
    witness: Option<Vec<usize>>,
    /// Coalitions of every size up to `T` whose mutual information was
    /// enumerated.
    mi_coalitions: usize,
    mi_independent: Option<bool>,
    mi_bits_max: Option<f64>,
    mi_skipped: Option<String>,
}

fn audit_privacy(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = scheme_params(cfg)?;
    if params.variant != Variant::Lagrange {
        return Err(CliError::Usage("privacy audit needs the Lagrange layout".into()));
    }
    let field = field_for(cfg, &params)?;
    let points = make_eval_points(&field, &params).map_err(CliError::compute)?;
    let u = build_matrix(&field, &points);
    let audit = audit_mds(&field, &u);
    let (mds, subsets_checked, witness) = match audit {
        MdsAudit::Pass { subsets_checked } => ("pass", subsets_checked, None),
        MdsAudit::Fail { witness } => ("fail", 0, Some(witness)),
    };
    let mut mi_coalitions = 0;
    let mut independent = true;
    let mut bits_max: f64 = 0.0;
    let mut skipped = None;
    'sizes: for size in 1..=params.t {
        let mut err = None;
        for_each_subset(params.n, size, |c| match measure_mi_exhaustive(&field, cfg.block_len, &points, c) {
            Ok(mi) => {
                mi_coalitions += 1;
                independent &= mi.independent;
                bits_max = bits_max.max(mi.bits);
                true
            }
            Err(e) => {
                err = Some(e);
                false
            }
        });
        match err {
            None => {}
            Some(PrivacyError::StateSpaceTooLarge(states)) => {
                skipped = Some(format!("{states} dataset/pad combinations exceed the enumeration limit"));
                break 'sizes;
            }
            Some(e) => return Err(CliError::compute(e)),
        }
    }
    let measured = skipped.is_none() && params.t > 0;
    let report = PrivacyReport {
        config: cfg,
        modulus: field.modulus(),
        mds,
        subsets_checked,
        witness,
        mi_coalitions,
        mi_independent: measured.then_some(independent),
        mi_bits_max: measured.then_some(bits_max),
        mi_skipped: skipped.clone(),
    };
    let file = write_json(&cfg.out_dir(), "privacy.json", &report)?;
    let mut lines = vec![match &report.witness {
        None => format!("mds: pass ({subsets_checked} submatrices)"),
        Some(w) => format!("mds: fail (singular on workers {})", id_list(w)),
    }];
    lines.push(match (&skipped, measured) {
        (Some(s), _) => format!("mutual information: skipped, {s}"),
        (None, false) => "mutual information: nothing to measure with T = 0".into(),
        (None, true) => format!(
            "mutual information: max {bits_max} bits over {mi_coalitions} coalitions ({})",
            if independent { "independent" } else { "leaks" }
        ),
    });
    Ok(Outcome { lines, files: vec![file] })
}

fn regression_problem(cfg: &RunConfig) -> Result<RegressionProblem, CliError> {
    let r = &cfg.regress;
    match &r.data {
        None => Ok(RegressionProblem::synthetic(r.m, r.d, cfg.seed).0),
        Some(path) => {
            let rows: Vec<Vec<f64>> = read_numeric_csv(path)?;
            let d = rows[0].len().checked_sub(1).filter(|&d| d > 0).ok_or_else(|| {
                CliError::Format(format!("{}: need at least one feature and a label", path.display()))
            })?;
            let x = rows.iter().flat_map(|row| row[..d].iter().copied()).collect();
            let y = rows.iter().map(|row| row[d]).collect();
            RegressionProblem::new(x, y, d).map_err(CliError::compute)
        }
    }
}

#[derive(Serialize)]
struct IterationRow {
    iteration: usize,
    loss: f64,
    rel_error: f64,
    exact: bool,
    used: String,
    wall_clock: f64,
    comm: f64,
    comp: f64,
}

impl From<&IterationRecord> for IterationRow {
    fn from(r: &IterationRecord) -> Self {
        Self {
            iteration: r.iteration,
            loss: r.loss,
            rel_error: r.rel_error,
            exact: r.exact,
            used: id_list(&r.used),
            wall_clock: r.wall_clock,
            comm: r.comm,
            comp: r.comp,
        }
    }
}

#[derive(Serialize)]
struct Timing {
    comm: f64,
    comp: f64,
    total: f64,
}

#[derive(Serialize)]
struct RegressReport<'a> {
    config: &'a RunConfig,
    m: usize,
    d: usize,
    k: usize,
    threshold: usize,
    lower_bound: usize,
    initial_loss: f64,
    loss: Vec<f64>,
    max_rel_error: f64,
    /// Field mode only.
    all_exact: Option<bool>,
    warnings: Vec<Warning>,
    timing: Timing,
    w: Vec<f64>,
}

fn regress(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = &cfg.regress;
    let problem = regression_problem(cfg)?;
    let mode = match r.mode {
        ModeKind::Real => Mode::Real,
        ModeKind::Field => Mode::Field(QuantizationConfig { scale_bits: r.scale, ..QuantizationConfig::default() }),
    };
    let gd = GdConfig {
        n: r.n,
        r: r.r,
        iterations: r.iters,
        step: r.step,
        momentum: r.momentum,
        mode,
        precision: r.precision,
        stragglers: StragglerPlan::Random(r.stragglers),
        labels: r.labels,
        delay: cfg.delay.model(),
        seed: cfg.seed,
        ..GdConfig::default()
    };
    let res = lcc_gd(&problem, &gd).map_err(|e| match e {
        RegressionError::InfeasibleParams { n, r, threshold } => CliError::Infeasible(format!(
            "infeasible (2·⌈{n}/{r}⌉−1 = {threshold} > {n} workers)"
        )),
        RegressionError::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
        other => CliError::compute(other),
    })?;
    let field_mode = matches!(mode, Mode::Field(_));
    let report = RegressReport {
        config: cfg,
        m: problem.m,
        d: problem.d,
        k: res.k,
        threshold: res.threshold,
        lower_bound: res.lower_bound,
        initial_loss: res.initial_loss,
        loss: res.losses(),
        max_rel_error: res.max_rel_error(),
        all_exact: field_mode.then(|| res.all_exact()),
        warnings: res.warnings.clone(),
        timing: Timing { comm: res.comm, comp: res.comp, total: res.total },
        w: res.w.clone(),
    };
    let out = cfg.out_dir();
    let rows: Vec<IterationRow> = res.iterations.iter().map(IterationRow::from).collect();
    let csv = write_csv(&out, "regress.csv", &rows)?;
    let json = write_json(&out, "regress.json", &report)?;
    let mut lines = vec![
        format!("K = {}, recovery threshold {} (lower bound {}) of {} workers", res.k, res.threshold, res.lower_bound, r.n),
        format!(
            "loss {:.6e} -> {:.6e} after {} iterations",
            res.initial_loss,
            res.losses().last().copied().unwrap_or(res.initial_loss),
            r.iters
        ),
        format!("time: comm {:.4} s, comp {:.4} s, total {:.4} s", res.comm, res.comp, res.total),
    ];
    lines.push(if field_mode {
        format!("decoded gradients exact every iteration: {}", res.all_exact())
    } else {
        format!("max relative gradient error {:.3e}", res.max_rel_error())
    });
    if !res.warnings.is_empty() {
        lines.push(format!("{} conditioning warnings", res.warnings.len()));
    }
    Ok(Outcome { lines, files: vec![json, csv] })
}

#[derive(Serialize)]
struct BenchRow {
    seed: u64,
    scheme: &'static str,
    comm: f64,
    comp: f64,
    total: f64,
    waited_for: usize,
    workers: usize,
}

#[derive(Serialize)]
struct SchemeSummary {
    scheme: &'static str,
    waited_for: usize,
    mean_total: f64,
}

#[derive(Serialize)]
struct BenchReport<'a> {
    config: &'a RunConfig,
    n: usize,
    r: usize,
    lower_bound: usize,
    runs: usize,
    lagrange_faster_than_uncoded: usize,
    schemes: Vec<SchemeSummary>,
}

fn bench(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (n, r) = (cfg.regress.n, cfg.regress.r);
    if r == 0 || r > n {
        return Err(CliError::Usage(format!("--r {r}: need 1 <= r <= n = {n}")));
    }
    let bc = BenchConfig { n, r, iterations: cfg.regress.iters, delay: cfg.delay.model() };
    let runs = benchmark(&bc, cfg.runs, cfg.seed);
    let rows: Vec<BenchRow> = runs
        .iter()
        .flat_map(|run| {
            run.timings.iter().map(move |t| BenchRow {
                seed: run.seed,
                scheme: t.scheme.name(),
                comm: t.comm,
                comp: t.comp,
                total: t.total,
                waited_for: t.waited_for,
                workers: t.workers,
            })
        })
        .collect();
    let wins = runs.iter().filter(|x| x.get(Scheme::Lagrange).total < x.get(Scheme::Uncoded).total).count();
    let schemes: Vec<SchemeSummary> = Scheme::ALL
        .iter()
        .map(|&s| SchemeSummary {
            scheme: s.name(),
            waited_for: runs.first().map_or(0, |x| x.get(s).waited_for),
            mean_total: runs.iter().map(|x| x.get(s).total).sum::<f64>() / runs.len().max(1) as f64,
        })
        .collect();
    let lower_bound = runs.first().map_or(0, |x| x.lower_bound);
    let report = BenchReport { config: cfg, n, r, lower_bound, runs: runs.len(), lagrange_faster_than_uncoded: wins, schemes };
    let out = cfg.out_dir();
    let csv = write_csv(&out, "bench.csv", &rows)?;
    let json = write_json(&out, "bench.json", &report)?;
    let mut lines: Vec<String> = report
        .schemes
        .iter()
        .map(|s| format!("{:<10} waited_for {:>3}  mean total {:.4} s", s.scheme, s.waited_for, s.mean_total))
        .collect();
    let waited = |s: Scheme| runs.first().map_or(0, |x| x.get(s).waited_for);
    lines.push(format!(
        "lagrange faster than uncoded in {wins} of {} runs (waited_for: lagrange {} vs uncoded {})",
        runs.len(),
        waited(Scheme::Lagrange),
        waited(Scheme::Uncoded)
    ));
    Ok(Outcome { lines, files: vec![json, csv] })
}
