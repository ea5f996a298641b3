//! The `mconc` command line. [`run`] takes the argument vector and writers
//! for stdout and stderr and returns the exit code, so tests can drive it
//! in-process.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use multipartite_concurrence::bounds::{
    corollary1_bound, delta_bound, scheme_bound, theorem1_bound, theorem2_bound, BoundReport, Providers,
    TripartiteMethod,
};
use multipartite_concurrence::example::{example_point, sweep, sweep_to_file, write_csv};
use multipartite_concurrence::io::read_state;
use multipartite_concurrence::ops::regroup_density;
use multipartite_concurrence::partitions::enumerate_partitions;
use multipartite_concurrence::pure::{concurrence_partition, ConcurrenceValue};
use multipartite_concurrence::selftest;
use multipartite_concurrence::weights::{compose_weights, first_violation, verify_weights, Objective};
use multipartite_concurrence::{DensityMatrix, Error, Partition, WeightScheme};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "mconc",
    version,
    about = "Multipartite concurrence and its mixed-state lower bounds"
)]
struct Cli {
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Worker threads for sweeps and suites (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact concurrence of a pure state, optionally under a partition.
    Concurrence {
        #[arg(long)]
        state: PathBuf,
        /// Blocks like "1|2|34"; defaults to all singletons.
        #[arg(long)]
        partition: Option<String>,
    },
    /// Lower bound on the concurrence of a (mixed) state.
    Bound(BoundArgs),
    /// List the partitions of N subsystems into M blocks.
    Partitions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Largest valid weights for a family of partitions.
    Compose {
        #[arg(long)]
        n: usize,
        /// Comma-separated partitions, e.g. "1|2|34,12|34".
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "max-uniform")]
        objective: String,
    },
    /// Coverage slack of a weight scheme on every subset.
    VerifyScheme {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        scheme: PathBuf,
    },
    /// The noisy two-Bell-pair family.
    Example {
        #[command(subcommand)]
        action: ExampleAction,
    },
    /// Run the invariant suites.
    Selftest {
        /// Random instances per suite.
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    state: PathBuf,
    /// theorem1, corollary1, delta, theorem2 or scheme.
    #[arg(long)]
    method: String,
    /// "best" or a comma list of ppt, ccnr, wootters, pure.
    #[arg(long, default_value = "best")]
    providers: String,
    /// Tripartite terms of theorem1: relation, theorem2 or best.
    #[arg(long, default_value = "best")]
    tripartite: String,
    /// Weight scheme file for --method scheme.
    #[arg(long)]
    scheme: Option<PathBuf>,
    /// For theorem2 on four qubits: the i|j|kl grouping to use.
    #[arg(long)]
    partition: Option<String>,
}

#[derive(Subcommand, Debug)]
enum ExampleAction {
    /// CSV of every column over a grid of t.
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 1001)]
        steps: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "best")]
        providers: String,
    },
    /// All columns at one t, as JSON.
    Point {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value = "best")]
        providers: String,
    },
}

/// Failure of a command: either a library error or a plain message with its
/// exit code.
enum Failure {
    Lib(Error),
    Exit(i32, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start {:?} workers: {e}", cli.jobs);
            return EXIT_DOMAIN;
        }
    };
    // commands write to a buffer so the work can run on the pool
    let mut buf = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut buf));
    if let Err(e) = out.write_all(&buf).and_then(|_| out.flush()) {
        let _ = writeln!(err, "error: writing output: {e}");
        return EXIT_INPUT;
    }
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_DOMAIN
            }
        }
        Err(Failure::Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Concurrence { state, partition } => concurrence(cli, out, state, partition.as_deref()),
        Command::Bound(args) => bound(cli, out, args),
        Command::Partitions { n, m } => partitions(cli, out, *n, *m),
        Command::Compose { n, family, objective } => compose(cli, out, *n, family, objective),
        Command::VerifyScheme { n, scheme } => verify_scheme(cli, out, *n, scheme),
        Command::Example { action } => example(cli, out, action),
        Command::Selftest { cases } => run_selftest(cli, out, *cases),
    }
}

fn io_fail(e: std::io::Error) -> Failure {
    Failure::Exit(EXIT_INPUT, format!("writing output: {e}"))
}

fn emit(out: &mut dyn Write, text: &str) -> CmdResult {
    writeln!(out, "{text}").map_err(io_fail)
}

fn to_json(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values serialize")
}

/// Decimal with 12 significant digits and trailing zeros removed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn read_scheme(path: &Path) -> Result<WeightScheme, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    WeightScheme::from_json(&text)
}

fn concurrence(cli: &Cli, out: &mut dyn Write, path: &Path, partition: Option<&str>) -> CmdResult {
    let state = read_state(path)?;
    let psi = state.as_pure().ok_or_else(|| {
        Failure::Exit(
            EXIT_DOMAIN,
            "concurrence is defined for pure states; use `bound` for mixed states".into(),
        )
    })?;
    let n = psi.shape().len();
    let p = match partition {
        Some(text) => Partition::parse_with(text, n)?,
        None => Partition::new(n, (0..n).map(|k| 1u32 << k).collect())?,
    };
    let ConcurrenceValue { value, squared } = concurrence_partition(&psi, &p)?;
    if cli.pretty {
        emit(
            out,
            &format!(
                "partition  {p}\nvalue      {}\nsquared    {}",
                sig12(value),
                sig12(squared)
            ),
        )
    } else {
        emit(
            out,
            &format!(
                "{{\"partition\":\"{p}\",\"value\":{},\"squared\":{}}}",
                sig12(value),
                sig12(squared)
            ),
        )
    }
}

fn four_party_224(rho: &DensityMatrix, text: &str) -> Result<DensityMatrix, Failure> {
    let p = Partition::parse_with(text, 4)?;
    if p.profile() != [2, 1, 1] {
        return Err(Failure::Exit(
            EXIT_DOMAIN,
            format!("partition {p} is not of the form i|j|kl"),
        ));
    }
    let mut groups = p.blocks().to_vec();
    groups.sort_by_key(|b| b.count_ones());
    Ok(regroup_density(rho, &groups)?)
}

fn bound(cli: &Cli, out: &mut dyn Write, args: &BoundArgs) -> CmdResult {
    let providers: Providers = args.providers.parse()?;
    let rho = read_state(&args.state)?.density();
    let report: BoundReport = match args.method.as_str() {
        "theorem1" => theorem1_bound(&rho, args.tripartite.parse::<TripartiteMethod>()?, &providers)?,
        "corollary1" => corollary1_bound(&rho, &providers)?,
        "delta" => delta_bound(&rho, &providers)?,
        "theorem2" => match &args.partition {
            Some(text) => theorem2_bound(&four_party_224(&rho, text)?, &providers)?,
            None => theorem2_bound(&rho, &providers)?,
        },
        "scheme" => {
            let path = args
                .scheme
                .as_ref()
                .ok_or_else(|| Failure::Exit(EXIT_INPUT, "--method scheme needs --scheme FILE".into()))?;
            scheme_bound(&rho, &read_scheme(path)?, &providers)?
        }
        other => {
            return Err(Failure::Exit(
                EXIT_DOMAIN,
                format!("unknown method {other:?}; expected theorem1, corollary1, delta, theorem2 or scheme"),
            ))
        }
    };
    if cli.pretty {
        let mut text = format!(
            "method   {}\nvalue    {}\nsquared  {}\n",
            report.method,
            sig12(report.value),
            sig12(report.squared)
        );
        for (k, v) in &report.contributions {
            text.push_str(&format!("  {k:<10} {}\n", sig12(*v)));
        }
        emit(out, text.trim_end())
    } else {
        emit(out, &serde_json::to_string(&report).expect("report serializes"))
    }
}

fn partitions(cli: &Cli, out: &mut dyn Write, n: usize, m: usize) -> CmdResult {
    let all = enumerate_partitions(n, m)?;
    let names: Vec<String> = all.iter().map(|p| p.to_string()).collect();
    if cli.pretty {
        emit(
            out,
            &format!(
                "{} partitions of {n} into {m} blocks\n{}",
                names.len(),
                names.join("\n")
            ),
        )
    } else {
        emit(
            out,
            &to_json(&json!({ "n": n, "m": m, "count": names.len(), "partitions": names })),
        )
    }
}

fn compose(cli: &Cli, out: &mut dyn Write, n: usize, family: &str, objective: &str) -> CmdResult {
    let objective: Objective = objective.parse()?;
    let family = family
        .split(',')
        .map(|t| Partition::parse_with(t.trim(), n))
        .collect::<Result<Vec<_>, _>>()?;
    let composed = compose_weights(n, &family, objective)?;
    if cli.pretty {
        let mut text = format!("uniform optimal: {}\n", composed.uniform_optimal);
        for (p, w) in composed.scheme.weights() {
            text.push_str(&format!("  {:<10} {w}\n", p.to_string()));
        }
        text.push_str(&format!("total: {}", composed.scheme.total()));
        emit(out, &text)
    } else {
        let weights: serde_json::Map<String, Value> = composed
            .scheme
            .weights()
            .iter()
            .map(|(p, w)| (p.to_string(), Value::String(w.to_string())))
            .collect();
        emit(
            out,
            &to_json(&json!({
                "n": n,
                "weights": weights,
                "total": composed.scheme.total().to_string(),
                "uniform_optimal": composed.uniform_optimal,
            })),
        )
    }
}

fn verify_scheme(cli: &Cli, out: &mut dyn Write, n: usize, path: &Path) -> CmdResult {
    let scheme = read_scheme(path)?;
    let slack = verify_weights(n, &scheme)?;
    let valid = first_violation(&slack).is_none();
    if cli.pretty {
        let mut text = String::new();
        for (a, s) in &slack {
            text.push_str(&format!("{:<6} {s}\n", a.to_string()));
        }
        text.push_str(if valid { "valid" } else { "INVALID" });
        emit(out, &text)?;
    } else {
        let map: serde_json::Map<String, Value> = slack
            .iter()
            .map(|(a, s)| (a.to_string(), Value::String(s.to_string())))
            .collect();
        emit(out, &to_json(&json!({ "n": n, "valid": valid, "slack": map })))?;
    }
    match first_violation(&slack) {
        None => Ok(()),
        Some((a, s)) => Err(Failure::Exit(
            EXIT_DOMAIN,
            format!("coverage violated on subset {a}: slack {s}"),
        )),
    }
}

fn example(cli: &Cli, out: &mut dyn Write, action: &ExampleAction) -> CmdResult {
    match action {
        ExampleAction::Sweep {
            from,
            to,
            steps,
            out: path,
            providers,
        } => {
            let providers: Providers = providers.parse()?;
            match path {
                Some(path) => {
                    let points = sweep_to_file(*from, *to, *steps, &providers, path)?;
                    if cli.pretty {
                        emit(out, &format!("wrote {} rows to {}", points.len(), path.display()))?;
                    }
                    Ok(())
                }
                None => {
                    let points = sweep(*from, *to, *steps, &providers)?;
                    write_csv(&points, out).map_err(io_fail)
                }
            }
        }
        ExampleAction::Point { t, providers } => {
            let point = example_point(*t, &providers.parse()?)?;
            let text = if cli.pretty {
                serde_json::to_string_pretty(&point)
            } else {
                serde_json::to_string(&point)
            };
            emit(out, &text.expect("point serializes"))
        }
    }
}

fn run_selftest(cli: &Cli, out: &mut dyn Write, cases: usize) -> CmdResult {
    if cases == 0 {
        return Err(Failure::Exit(EXIT_DOMAIN, "--cases must be positive".into()));
    }
    let reports = selftest::run_all(cli.seed, cases);
    let failed = reports.iter().filter(|r| !r.passed).count();
    if cli.pretty {
        let mut text = String::new();
        for r in &reports {
            let status = if r.passed { "PASS" } else { "FAIL" };
            text.push_str(&format!(
                "{status} {:<46} cases {:>5}  worst {:.3e}  tol {:.0e}\n",
                r.name, r.cases, r.worst, r.tolerance
            ));
        }
        text.push_str(&format!(
            "{} of {} suites passed",
            reports.len() - failed,
            reports.len()
        ));
        emit(out, &text)?;
    } else {
        // timings are left out so the output is reproducible
        let suites: Vec<Value> = reports
            .iter()
            .map(|r| json!({ "name": r.name, "passed": r.passed, "cases": r.cases, "worst": r.worst, "tolerance": r.tolerance }))
            .collect();
        emit(
            out,
            &to_json(&json!({ "seed": cli.seed, "passed": failed == 0, "suites": suites })),
        )?;
    }
    if failed > 0 {
        return Err(Failure::Exit(EXIT_DOMAIN, format!("{failed} suite(s) failed")));
    }
    Ok(())
}
