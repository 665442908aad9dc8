//! `deckwalk`: compute how faithfully a shuffled deck simulates a lattice
//! random walk, reproduce the reference table and profile curves, and answer
//! deck-sizing questions. Every command emits a reproducible run record
//! (`--json`) next to its human-readable output.

mod record;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;

use deckwalk::exact_tv::{tv_exact, tv_exact_rational, DeckSpec, TvMode};
use deckwalk::planner::{max_steps_for_deck, min_deck_for_threshold, solve_c_for_epsilon};
use deckwalk::profile::{
    asymptotic_profile, profile_d1_closed, profile_d2_closed, profile_integral, ProfileParams,
};
use deckwalk::simulator::{
    deal_walk, empirical_suitcount_check, shuffle, tv_monte_carlo, PRNG_ALGORITHM,
};
use deckwalk::Error as CoreError;

use record::{fmt_real, RunRecord};

#[derive(Parser)]
#[command(
    name = "deckwalk",
    version,
    about = "Deck-vs-walk distance computations"
)]
struct Cli {
    /// Print the run record as JSON on stdout instead of text output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel reductions (default: hardware parallelism,
    /// or the RAYON_NUM_THREADS environment variable).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact distance d_n(N) between an n-step deal and the walk.
    Exact(ExactArgs),
    /// Asymptotic profile value at cards-per-step ratio c.
    Profile(ProfileArgs),
    /// Reference table for d = 1: profile values and inverted ratios.
    Table1,
    /// Profile values on a log-spaced ratio grid, written as CSV.
    Sweep(SweepArgs),
    /// Smallest deck for a step budget, or most steps for a deck.
    Plan(PlanArgs),
    /// Seeded simulation: Monte-Carlo estimators or trajectory dumps.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct ExactArgs {
    /// Walk dimension (the deck has 2d suits).
    #[arg(long)]
    d: u32,
    /// Number of steps (cards dealt).
    #[arg(long)]
    n: u64,
    /// Deck size; must be a multiple of 2d.
    #[arg(long = "N")]
    cards: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Rational)]
    mode: ModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Exact big-rational summation (capacity-capped).
    Rational,
    /// Compensated log-space summation.
    LogFloat,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    d: u32,
    /// Cards-per-step ratio.
    #[arg(long)]
    c: f64,
    /// Defaults to the closed form when one exists, quadrature otherwise.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Closed,
    Quadrature,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    d: u32,
    #[arg(long = "c-min")]
    c_min: f64,
    #[arg(long = "c-max")]
    c_max: f64,
    /// Grid size (log-spaced).
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Output CSV path (header `c,profile`).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    d: u32,
    /// Distance threshold in (0, 1).
    #[arg(long)]
    eps: f64,
    /// Plan a deck for this many steps.
    #[arg(long, conflicts_with = "cards")]
    n: Option<u64>,
    /// Plan steps for this deck size.
    #[arg(long = "N")]
    cards: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    d: u32,
    #[arg(long = "N")]
    cards: u64,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Tv)]
    estimator: EstimatorArg,
    /// Trajectories to deal when the estimator is `walks`.
    #[arg(long, default_value_t = 1)]
    walks: u64,
    /// Write CSV here instead of stdout (trajectory dumps).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorArg {
    /// Monte-Carlo estimate of the distance.
    Tv,
    /// Chi-square check of empirical suit counts against their law.
    Suitcount,
    /// Deal trajectories and dump them as CSV.
    Walks,
}

enum CmdError {
    Core(CoreError),
    Io(std::io::Error),
    Usage(String),
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        CmdError::Core(e)
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e)
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Core(e) => write!(f, "{e}"),
            CmdError::Io(e) => write!(f, "i/o error: {e}"),
            CmdError::Usage(m) => write!(f, "{m}"),
        }
    }
}

// Exit codes are a stable contract: 0 success, 2 usage/domain, 3 capacity,
// 4 i/o (numeric non-convergence surfaces as 1).
fn exit_for(err: &CmdError) -> u8 {
    match err {
        CmdError::Core(CoreError::Domain(_)) | CmdError::Usage(_) => 2,
        CmdError::Core(CoreError::Capacity(_)) => 3,
        CmdError::Core(CoreError::Numeric { .. }) => 1,
        CmdError::Io(_) => 4,
    }
}

struct CmdOutput {
    record: RunRecord,
    lines: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let start = Instant::now();
    match run(&cli.command) {
        Ok(mut out) => {
            out.record.wall_time_s = start.elapsed().as_secs_f64();
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.record).unwrap());
            } else {
                for line in &out.lines {
                    println!("{line}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

fn run(command: &Command) -> Result<CmdOutput, CmdError> {
    match command {
        Command::Exact(args) => cmd_exact(args),
        Command::Profile(args) => cmd_profile(args),
        Command::Table1 => cmd_table1(),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Simulate(args) => cmd_simulate(args),
    }
}

fn cmd_exact(args: &ExactArgs) -> Result<CmdOutput, CmdError> {
    let deck = DeckSpec::from_total(args.d, args.cards)?;
    let mut rec = RunRecord::new("exact");
    rec.param("d", args.d)
        .param("n", args.n)
        .param("N", args.cards);
    let mut lines = Vec::new();
    match args.mode {
        ModeArg::Rational => {
            let exact = tv_exact_rational(&deck, args.n)?;
            let value = exact.to_f64().unwrap_or(f64::NAN);
            rec.param("mode", "rational");
            rec.method = "exact-rational".into();
            rec.error_bound = "exact".into();
            rec.real("tv", value).value("fraction", &exact);
            lines.push(format!(
                "d_{}({}) = {} (exact fraction {exact})",
                args.n,
                args.cards,
                fmt_real(value)
            ));
            lines.push("method = exact-rational, error bound = exact".into());
        }
        ModeArg::LogFloat => {
            let est = tv_exact(&deck, args.n, TvMode::LogFloat)?;
            rec.param("mode", "log-float");
            rec.method = est.method.to_string();
            rec.error_bound = est.error_bound.to_string();
            rec.real("tv", est.value);
            lines.push(format!(
                "d_{}({}) = {}",
                args.n,
                args.cards,
                fmt_real(est.value)
            ));
            lines.push(format!(
                "method = {}, error bound = {}",
                est.method, est.error_bound
            ));
        }
    }
    Ok(CmdOutput { record: rec, lines })
}

fn cmd_profile(args: &ProfileArgs) -> Result<CmdOutput, CmdError> {
    let mut rec = RunRecord::new("profile");
    rec.param("d", args.d).param("c", args.c);
    let mut lines = Vec::new();

    let closed_available = matches!(
        (args.d, args.c),
        (1, c) if c >= 2.0
    ) || matches!((args.d, args.c), (2, c) if c >= 4.0);

    let method = match args.method {
        Some(m) => m,
        None => {
            // Without an explicit method the theorem hypothesis c >= 2d is
            // enforced; quadrature below it must be requested explicitly.
            if args.c < 2.0 * args.d as f64 {
                return Err(CmdError::Core(CoreError::Domain(format!(
                    "ratio {} below the profile hypothesis c >= {}; pass --method quadrature to evaluate anyway",
                    args.c,
                    2 * args.d
                ))));
            }
            if closed_available {
                MethodArg::Closed
            } else {
                MethodArg::Quadrature
            }
        }
    };

    match method {
        MethodArg::Closed => {
            let value = match args.d {
                1 => profile_d1_closed(args.c)?,
                2 => profile_d2_closed(args.c)?,
                d => {
                    return Err(CmdError::Core(CoreError::Domain(format!(
                        "no closed form for d = {d}; use --method quadrature"
                    ))))
                }
            };
            rec.method = "closed".into();
            rec.error_bound = "exact".into();
            rec.real("profile", value);
            lines.push(format!(
                "profile(d={}, c={}) = {}",
                args.d,
                args.c,
                fmt_real(value)
            ));
            lines.push("method = closed".into());
        }
        MethodArg::Quadrature => {
            let params = ProfileParams::new(args.c, args.d)?;
            if !params.meets_hypothesis() {
                eprintln!(
                    "warning: c = {} is below 2d = {}; the limit statement does not cover this ratio",
                    args.c,
                    2 * args.d
                );
            }
            let pv = profile_integral(&params)?;
            rec.method = "quadrature".into();
            rec.error_bound = format!("{:e}", pv.quadrature_error);
            rec.real("profile", pv.value);
            rec.value("quadrature_error", format!("{:e}", pv.quadrature_error));
            lines.push(format!(
                "profile(d={}, c={}) = {}",
                args.d,
                args.c,
                fmt_real(pv.value)
            ));
            lines.push(format!(
                "method = quadrature, error bound = {:e}",
                pv.quadrature_error
            ));
        }
    }
    Ok(CmdOutput { record: rec, lines })
}

const TABLE_RATIOS: [f64; 6] = [2.00, 2.94, 5.35, 24.70, 48.89, 242.47];
const TABLE_TARGETS: [f64; 6] = [0.160, 0.100, 0.050, 0.010, 0.005, 0.001];

fn cmd_table1() -> Result<CmdOutput, CmdError> {
    let mut rec = RunRecord::new("table1");
    rec.method = "closed".into();
    let mut lines = Vec::new();
    lines.push("forward: profile value at tabulated ratios (d = 1)".into());
    lines.push("      c    profile".into());
    for c in TABLE_RATIOS {
        let v = profile_d1_closed(c)?;
        lines.push(format!("{c:>9.2}  {v:.6}"));
        rec.real(&format!("profile_c_{c:.2}"), v);
    }
    lines.push(String::new());
    lines.push("inverse: ratio solving profile(c) = eps (d = 1)".into());
    lines.push("    eps          c".into());
    for eps in TABLE_TARGETS {
        let c = solve_c_for_epsilon(1, eps)?;
        lines.push(format!("{eps:>7.3}  {c:>9.4}"));
        rec.real(&format!("c_star_eps_{eps:.3}"), c);
    }
    Ok(CmdOutput { record: rec, lines })
}

fn cmd_sweep(args: &SweepArgs) -> Result<CmdOutput, CmdError> {
    if args.c_min < 2.0 * args.d as f64 {
        return Err(CmdError::Core(CoreError::Domain(format!(
            "c-min {} below 2d = {}",
            args.c_min,
            2 * args.d
        ))));
    }
    if args.c_max <= args.c_min || args.c_max.is_nan() || args.points < 2 {
        return Err(CmdError::Usage(
            "need c-max > c-min and at least two points".into(),
        ));
    }
    let mut csv = String::from("c,profile\n");
    let mut first = f64::NAN;
    let mut last = f64::NAN;
    for i in 0..args.points {
        let t = i as f64 / (args.points - 1) as f64;
        let c = args.c_min * (args.c_max / args.c_min).powf(t);
        let v = asymptotic_profile(args.d, c)?;
        if i == 0 {
            first = v;
        }
        last = v;
        csv.push_str(&fmt_real(c));
        csv.push(',');
        csv.push_str(&fmt_real(v));
        csv.push('\n');
    }
    let mut file = std::fs::File::create(&args.out)?;
    file.write_all(csv.as_bytes())?;

    let mut rec = RunRecord::new("sweep");
    rec.param("d", args.d)
        .param("c_min", args.c_min)
        .param("c_max", args.c_max)
        .param("points", args.points)
        .param("out", args.out.display());
    rec.method = "closed/quadrature".into();
    rec.real("first", first).real("last", last);
    let lines = vec![format!(
        "wrote {} rows to {} (profile {} .. {})",
        args.points,
        args.out.display(),
        fmt_real(first),
        fmt_real(last)
    )];
    Ok(CmdOutput { record: rec, lines })
}

fn cmd_plan(args: &PlanArgs) -> Result<CmdOutput, CmdError> {
    let mut rec = RunRecord::new("plan");
    rec.param("d", args.d).param("eps", args.eps);
    let mut lines = Vec::new();
    let (label, plan) = match (args.n, args.cards) {
        (Some(n), None) => {
            rec.param("n", n);
            ("N", min_deck_for_threshold(args.d, n, args.eps)?)
        }
        (None, Some(cards)) => {
            rec.param("N", cards);
            ("n", max_steps_for_deck(args.d, cards, args.eps)?)
        }
        _ => {
            return Err(CmdError::Usage(
                "pass exactly one of --n (steps) or --N (deck size)".into(),
            ))
        }
    };
    rec.method = plan.method.to_string();
    rec.real("c_star", plan.c_star);
    rec.value("answer", plan.answer);
    rec.real("achieved", plan.achieved);
    rec.value("feasible", plan.feasible);
    rec.value("window_monotone", plan.window_monotone);
    lines.push(format!("c* = {}", fmt_real(plan.c_star)));
    lines.push(format!("recommended {label} = {}", plan.answer));
    lines.push(format!(
        "achieved distance = {} (method {})",
        fmt_real(plan.achieved),
        plan.method
    ));
    if !plan.feasible {
        lines.push("warning: threshold not met within the search cap".into());
    }
    if !plan.window_monotone {
        lines.push("note: distance was not monotone over the scanned window".into());
    }
    Ok(CmdOutput { record: rec, lines })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<CmdOutput, CmdError> {
    let deck = DeckSpec::from_total(args.d, args.cards)?;
    let mut rec = RunRecord::new("simulate");
    rec.param("d", args.d)
        .param("N", args.cards)
        .param("n", args.n)
        .param("prng", PRNG_ALGORITHM);
    rec.seed = Some(args.seed);
    let mut lines = Vec::new();
    match args.estimator {
        EstimatorArg::Tv => {
            rec.param("samples", args.samples);
            rec.param("estimator", "tv");
            let est = tv_monte_carlo(&deck, args.n, args.samples, args.seed)?;
            rec.method = est.method.to_string();
            rec.error_bound = est.error_bound.to_string();
            rec.real("tv", est.value);
            lines.push(format!(
                "tv estimate = {} (3-sigma bound {})",
                fmt_real(est.value),
                est.error_bound
            ));
        }
        EstimatorArg::Suitcount => {
            rec.param("samples", args.samples);
            rec.param("estimator", "suitcount");
            let report = empirical_suitcount_check(&deck, args.n, args.samples, args.seed)?;
            rec.method = "chi-square".into();
            rec.error_bound = "exact".into();
            rec.real("statistic", report.statistic);
            rec.value("dof", report.dof);
            rec.real("p_value", report.p_value);
            rec.value("pass", report.pass);
            lines.push(format!(
                "chi-square = {:.4} with {} dof, p = {:.6} -> {}",
                report.statistic,
                report.dof,
                report.p_value,
                if report.pass { "pass" } else { "reject" }
            ));
        }
        EstimatorArg::Walks => {
            rec.param("walks", args.walks);
            rec.param("estimator", "walks");
            rec.method = "deal".into();
            rec.error_bound = "exact".into();
            let mut csv = String::from("walk,step,suit");
            for axis in 1..=args.d {
                csv.push_str(&format!(",x{axis}"));
            }
            csv.push('\n');
            for w in 0..args.walks {
                let sigma = shuffle(deck.total(), args.seed.wrapping_add(w));
                let walk = deal_walk(&sigma, args.n as usize, args.d)?;
                for (step, suit) in walk.suits.iter().enumerate() {
                    csv.push_str(&format!("{w},{},{suit}", step + 1));
                    for coord in &walk.positions[step + 1] {
                        csv.push_str(&format!(",{coord}"));
                    }
                    csv.push('\n');
                }
            }
            match &args.out {
                Some(path) => {
                    std::fs::write(path, csv.as_bytes())?;
                    rec.param("out", path.display());
                    lines.push(format!(
                        "wrote {} walks of {} steps to {}",
                        args.walks,
                        args.n,
                        path.display()
                    ));
                }
                None => lines.push(csv.trim_end().to_string()),
            }
            rec.value("steps", args.n);
        }
    }
    Ok(CmdOutput { record: rec, lines })
}
