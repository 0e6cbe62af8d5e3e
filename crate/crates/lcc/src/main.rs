use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lcc::config::{ModeKind, SpecKind};
use lcc::{run, CliError, Command, RunConfig};
use lcc_core::regression::{LabelPlacement, Precision};
use lcc_core::simulator::Corruption;

/// Lagrange coded computing: planning, encoding, simulation, privacy audits
/// and coded regression.
#[derive(Parser, Debug)]
#[command(name = "lcc", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Check (N, K, S, A, T, deg) against both region inequalities.
    Plan(Opts),
    /// Encode a dataset into per-worker share files.
    Encode(Opts),
    /// Run rounds with stragglers and adversaries and check every decode.
    Simulate(Opts),
    /// Simulate every feasible tuple up to the given bounds.
    Sweep(Opts),
    /// MDS audit of the encoding matrix and exhaustive mutual information.
    AuditPrivacy(Opts),
    /// Coded gradient descent for least squares.
    Regress(Opts),
    /// Virtual-clock timing of uncoded, repetition and Lagrange regression.
    Bench(Opts),
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// JSON config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report directory [default: $LCC_OUT_DIR, else ./lcc-out].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,

    /// Workers.
    #[arg(long = "N", help_heading = "Scheme")]
    n_workers: Option<usize>,
    /// Data blocks.
    #[arg(long = "K", help_heading = "Scheme")]
    k: Option<usize>,
    /// Stragglers tolerated.
    #[arg(long = "S", help_heading = "Scheme")]
    s: Option<usize>,
    /// Adversaries tolerated.
    #[arg(long = "A", help_heading = "Scheme")]
    a: Option<usize>,
    /// Colluding workers that learn nothing.
    #[arg(long = "T", help_heading = "Scheme")]
    t: Option<usize>,
    /// Degree of the worker computation.
    #[arg(long, help_heading = "Scheme")]
    deg: Option<usize>,
    /// Prime modulus.
    #[arg(long = "p", help_heading = "Scheme")]
    modulus: Option<u64>,
    /// Entries per block.
    #[arg(long = "M", help_heading = "Scheme")]
    block_len: Option<usize>,
    #[arg(long, value_enum, help_heading = "Scheme")]
    spec: Option<SpecArg>,
    #[arg(long, help_heading = "Scheme")]
    trials: Option<usize>,
    /// Fixed corruption mode; rotates through all of them when absent.
    #[arg(long, value_enum, help_heading = "Scheme")]
    corruption: Option<CorruptionArg>,
    /// Integer dataset for `encode`, one block per row.
    #[arg(long, help_heading = "Scheme")]
    input: Option<PathBuf>,

    #[arg(long, help_heading = "Sweep")]
    max_n: Option<usize>,
    #[arg(long, help_heading = "Sweep")]
    max_k: Option<usize>,
    #[arg(long, help_heading = "Sweep")]
    max_deg: Option<usize>,
    /// Trials per tuple.
    #[arg(long, help_heading = "Sweep")]
    sweep_trials: Option<usize>,

    /// Workers.
    #[arg(long = "n", help_heading = "Regression")]
    n: Option<usize>,
    /// Partitions stored per worker.
    #[arg(long = "r", help_heading = "Regression")]
    r: Option<usize>,
    /// Synthetic rows.
    #[arg(long = "m", help_heading = "Regression")]
    m: Option<usize>,
    /// Synthetic features.
    #[arg(long = "d", help_heading = "Regression")]
    d: Option<usize>,
    #[arg(long, help_heading = "Regression")]
    iters: Option<usize>,
    #[arg(long, value_enum, help_heading = "Regression")]
    mode: Option<ModeArg>,
    /// Fixed-point scale 2^scale (field mode).
    #[arg(long, help_heading = "Regression")]
    scale: Option<u32>,
    #[arg(long, value_enum, help_heading = "Regression")]
    precision: Option<PrecisionArg>,
    #[arg(long, value_enum, help_heading = "Regression")]
    labels: Option<LabelsArg>,
    #[arg(long, help_heading = "Regression")]
    step: Option<f64>,
    #[arg(long, help_heading = "Regression")]
    momentum: Option<f64>,
    /// Workers dropped each iteration.
    #[arg(long, help_heading = "Regression")]
    stragglers: Option<usize>,
    /// CSV of samples, label in the last column.
    #[arg(long, help_heading = "Regression")]
    data: Option<PathBuf>,
    /// Benchmark runs.
    #[arg(long, help_heading = "Regression")]
    runs: Option<usize>,

    /// Probability a worker is held up.
    #[arg(long, help_heading = "Delays")]
    delay_prob: Option<f64>,
    /// Seconds a held-up worker loses.
    #[arg(long, help_heading = "Delays")]
    delay_secs: Option<f64>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum SpecArg {
    Identity,
    Square,
    Monomial,
    Bilinear,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum CorruptionArg {
    RandomReplace,
    AdditiveOffset,
    Targeted,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Real,
    Field,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum LabelsArg {
    Master,
    Coded,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl Opts {
    fn into_config(self, command: Command) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        c.command = Some(command);
        set(&mut c.seed, self.seed);
        if self.out.is_some() {
            c.out = self.out;
        }
        let s = &mut c.scheme;
        set(&mut s.n, self.n_workers);
        set(&mut s.k, self.k);
        set(&mut s.s, self.s);
        set(&mut s.a, self.a);
        set(&mut s.t, self.t);
        set(&mut s.deg, self.deg);
        if self.modulus.is_some() {
            c.modulus = self.modulus;
        }
        set(&mut c.block_len, self.block_len);
        if let Some(v) = self.spec {
            c.spec = Some(match v {
                SpecArg::Identity => SpecKind::Identity,
                SpecArg::Square => SpecKind::Square,
                SpecArg::Monomial => SpecKind::Monomial,
                SpecArg::Bilinear => SpecKind::Bilinear,
            });
        }
        set(&mut c.trials, self.trials);
        if let Some(v) = self.corruption {
            c.corruption = Some(match v {
                CorruptionArg::RandomReplace => Corruption::RandomReplace,
                CorruptionArg::AdditiveOffset => Corruption::AdditiveOffset,
                CorruptionArg::Targeted => Corruption::Targeted,
            });
        }
        if self.input.is_some() {
            c.input = self.input;
        }
        set(&mut c.sweep.max_n, self.max_n);
        set(&mut c.sweep.max_k, self.max_k);
        set(&mut c.sweep.max_deg, self.max_deg);
        set(&mut c.sweep.trials, self.sweep_trials);
        let r = &mut c.regress;
        set(&mut r.n, self.n);
        set(&mut r.r, self.r);
        set(&mut r.m, self.m);
        set(&mut r.d, self.d);
        set(&mut r.iters, self.iters);
        set(
            &mut r.mode,
            self.mode.map(|m| match m {
                ModeArg::Real => ModeKind::Real,
                ModeArg::Field => ModeKind::Field,
            }),
        );
        set(&mut r.scale, self.scale);
        set(
            &mut r.precision,
            self.precision.map(|p| match p {
                PrecisionArg::Double => Precision::Double,
                PrecisionArg::Extended => Precision::Extended,
            }),
        );
        if let Some(l) = self.labels {
            r.labels = Some(match l {
                LabelsArg::Master => LabelPlacement::Master,
                LabelsArg::Coded => LabelPlacement::Coded,
            });
        }
        if self.step.is_some() {
            r.step = self.step;
        }
        set(&mut r.momentum, self.momentum);
        set(&mut r.stragglers, self.stragglers);
        if self.data.is_some() {
            r.data = self.data;
        }
        set(&mut c.runs, self.runs);
        set(&mut c.delay.prob, self.delay_prob);
        set(&mut c.delay.secs, self.delay_secs);
        Ok(c)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let (command, opts) = match cli.command {
        Sub::Plan(o) => (Command::Plan, o),
        Sub::Encode(o) => (Command::Encode, o),
        Sub::Simulate(o) => (Command::Simulate, o),
        Sub::Sweep(o) => (Command::Sweep, o),
        Sub::AuditPrivacy(o) => (Command::AuditPrivacy, o),
        Sub::Regress(o) => (Command::Regress, o),
        Sub::Bench(o) => (Command::Bench, o),
    };
    let result = opts.into_config(command).and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ CliError::Infeasible(_)) => {
            println!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
