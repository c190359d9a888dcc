//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when `verify`
//! finds a failed hypothesis, 3 when `oracle` finds a counterexample.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use relfix::frac::{boundary_residuals, solve_fde, FdeProblem, GammaVariant};
use relfix::gspace::{verify_g_properties, GFn, DEFAULT_ZERO_TOL};
use relfix::oracle::{
    conclusion_holds, default_sweep, default_sweeps, hypotheses_hold, run_oracle, FiniteInstance,
    OracleReport, Sweep,
};
use relfix::output::{grid_csv, residual_csv, semilog_svg, write_output, Series};
use relfix::picard::iterate;
use relfix::plane::{example1_g, example1_run, example2_run, PlanePoint, SameFirst, TaxicabG};
use relfix::StoppingPolicy;

#[derive(Parser, Debug)]
#[command(
    name = "relfix",
    version,
    about = "Relation-restricted Picard iteration, a finite theorem checker and a fractional BVP solver"
)]
struct Cli {
    /// JSON file of flag values for the subcommand (keys are long flag
    /// names); flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "JSON")]
    config: Option<PathBuf>,

    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the g axioms of an example, or every hypothesis of a finite
    /// instance.
    Verify(VerifyArgs),
    /// Run Picard iteration on a finite instance.
    Iterate(IterateArgs),
    /// Solve the fractional boundary value problem by Picard iteration.
    SolveFde(SolveArgs),
    /// Exhaustively model-check the fixed-point theorem on small instances.
    Oracle(OracleArgs),
    /// Iterate one of the two planar examples from (0, 1).
    Example(ExampleArgs),
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct VerifyArgs {
    /// Finite instance JSON: {"g": [...], "rel": {"n", "pairs"}, "map": [...], "alpha": {"num", "den"}}.
    #[arg(long, value_name = "JSON", conflicts_with = "which")]
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<PathBuf>,
    /// Built-in planar example.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    #[serde(skip_serializing_if = "Option::is_none")]
    which: Option<u8>,
    /// Write the JSON report here as well as to stdout.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct IterateArgs {
    #[arg(long, value_name = "JSON")]
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<PathBuf>,
    /// Start element r0 (default 0).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_iter: Option<usize>,
    /// Residual trace CSV.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    svg: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum VariantArg {
    /// α Γ(α + 1) / 4.
    Alpha,
    /// α Γ(ζ + 1) / 4.
    Zeta,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct SolveArgs {
    /// Fractional order ζ (default 0.9).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    zeta: Option<f64>,
    /// Number of grid intervals (default 512).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<usize>,
    /// Residual tolerance (default 1e-12).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    /// Iteration cap (default 1000).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_iter: Option<usize>,
    /// Gamma argument in the Lipschitz bound (default zeta).
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_variant: Option<VariantArg>,
    /// Solution CSV (`t,value`).
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    /// Residual trace CSV (`iteration,residual`).
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<PathBuf>,
    /// Semilog residual plot.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct OracleArgs {
    /// Carrier size; without it the n = 2 and n = 3 default sweeps run.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4))]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    /// Bound on |g| entries (needs --n).
    #[arg(long, requires = "n")]
    #[serde(skip_serializing_if = "Option::is_none")]
    g_max: Option<i64>,
    /// Cap on the number of relations (needs --n).
    #[arg(long, requires = "n")]
    #[serde(skip_serializing_if = "Option::is_none")]
    rel_cap: Option<usize>,
    /// Full JSON report.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ExampleArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    #[serde(skip_serializing_if = "Option::is_none")]
    which: Option<u8>,
    /// Iterations (default 30).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    /// Residual trace CSV.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    svg: Option<PathBuf>,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Fills flags missing from the command line with values from the config.
fn merge<T: Serialize + DeserializeOwned>(args: T, config: &Option<Value>) -> Result<T, Failure> {
    let Some(config) = config else {
        return Ok(args);
    };
    let Value::Object(mut merged) = config.clone() else {
        return Err(Failure::usage("config must be a JSON object"));
    };
    let Value::Object(given) =
        serde_json::to_value(args).map_err(|e| Failure::usage(e.to_string()))?
    else {
        unreachable!("argument structs serialize to objects");
    };
    merged.extend(given);
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| Failure::usage(format!("config: {e}")))
}

fn emit(path: &Path, contents: &str, force: bool) -> Result<(), Failure> {
    write_output(path, contents, force)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load_instance(path: &Path) -> Result<FiniteInstance, Failure> {
    read_json(path)
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn verify(args: VerifyArgs, force: bool) -> Outcome {
    let (report, ok) = match (args.instance, args.which) {
        (Some(path), _) => {
            let inst = load_instance(&path)?;
            let check = hypotheses_hold(&inst);
            let ok = check.holds;
            let report = json!({
                "hypotheses": check,
                "conclusion_holds": conclusion_holds(&inst),
                "fixed_points": inst.map.fixed_points(),
            });
            (report, ok)
        }
        (None, Some(which)) => {
            let levels = [-1.0, 0.0, 1.0];
            let samples: Vec<PlanePoint> = levels
                .iter()
                .flat_map(|&a| {
                    levels.iter().map(move |&b| PlanePoint {
                        first: a,
                        second: b,
                    })
                })
                .collect();
            let rep = if which == 1 {
                verify_g_properties(&example1_g(), &SameFirst, &samples, DEFAULT_ZERO_TOL)
            } else {
                verify_g_properties(&TaxicabG, &SameFirst, &samples, DEFAULT_ZERO_TOL)
            }
            .map_err(|e| Failure::usage(e.to_string()))?;
            let ok = rep.passed();
            (json!({ "example": which, "g_properties": rep }), ok)
        }
        (None, None) => return Err(Failure::usage("verify needs --instance or --which")),
    };
    let text = pretty(&report);
    print!("{text}");
    if let Some(path) = args.out {
        emit(&path, &text, force)?;
    }
    Ok(if ok { 0 } else { 2 })
}

fn iterate_cmd(args: IterateArgs, force: bool) -> Outcome {
    let path = args
        .instance
        .ok_or_else(|| Failure::usage("iterate needs --instance"))?;
    let inst = load_instance(&path)?;
    let start = args.start.unwrap_or(0);
    if start >= inst.n {
        return Err(Failure::usage(format!(
            "start {start} outside 0..{}",
            inst.n
        )));
    }
    let n = inst.n;
    let g = GFn::restricted(|a: &usize, b: &usize| inst.g[a * n + b] as f64);
    let policy = StoppingPolicy::new(0.5, args.max_iter.unwrap_or(4 * n + 4))
        .map_err(|e| Failure::usage(e.to_string()))?;
    let mut trace = iterate(&inst.map, &g, &inst.rel, start, policy)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let certificate = trace.attach_alpha(inst.alpha.value());
    println!("orbit: {:?}", trace.iterates);
    println!("residuals: {:?}", trace.residuals);
    println!(
        "converged: {}, preserved: {}, certified start: {}",
        trace.converged, trace.preserved, trace.certified
    );
    match certificate {
        Ok(()) => println!("geometric bound with alpha = {} holds", inst.alpha),
        Err(e) => println!("geometric bound with alpha = {} fails: {e}", inst.alpha),
    }
    for w in &trace.warnings {
        println!("warning: {w}");
    }
    write_trace(
        &trace.residuals,
        "Picard residuals",
        args.out,
        args.svg,
        force,
    )?;
    Ok(0)
}

fn write_trace(
    residuals: &[f64],
    title: &str,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
    force: bool,
) -> Result<(), Failure> {
    if let Some(path) = csv {
        emit(&path, &residual_csv(residuals), force)?;
    }
    if let Some(path) = svg {
        let plot = semilog_svg(
            title,
            "|g(r_n, r_n+1)|",
            &[Series {
                label: "residual",
                values: residuals,
            }],
        );
        emit(&path, &plot, force)?;
    }
    Ok(())
}

fn solve(args: SolveArgs, force: bool) -> Outcome {
    let zeta = args.zeta.unwrap_or(0.9);
    let grid = args.grid.unwrap_or(relfix::grid::DEFAULT_INTERVALS);
    let defaults = StoppingPolicy::default();
    let policy = StoppingPolicy::new(
        args.tol.unwrap_or(defaults.residual_tol),
        args.max_iter.unwrap_or(defaults.max_iterations),
    )
    .map_err(|e| Failure::usage(e.to_string()))?;
    let variant = match args.gamma_variant.unwrap_or(VariantArg::Zeta) {
        VariantArg::Alpha => GammaVariant::AlphaPlusOne,
        VariantArg::Zeta => GammaVariant::ZetaPlusOne,
    };
    let prob = FdeProblem::demo(zeta, grid)
        .map_err(|e| Failure::usage(e.to_string()))?
        .with_policy(policy)
        .with_gamma_variant(variant);
    let sol = solve_fde(&prob).map_err(|e| Failure::usage(e.to_string()))?;
    let (r0, r1) = boundary_residuals(&sol.solution);
    let r = &sol.trace.residuals;
    println!("zeta = {zeta}, N = {grid}, rhs h(t, u) = u/16 + sin t");
    println!(
        "iterations: {}, final residual: {:.3e}",
        r.len(),
        r[r.len() - 1]
    );
    println!(
        "Lipschitz ({variant:?}): bound {:.12}, observed {:.12}, {}",
        sol.lipschitz.bound,
        sol.lipschitz.worst_ratio,
        if sol.lipschitz.passes {
            "passes"
        } else {
            "fails"
        }
    );
    println!("f(1) = {:.15}", sol.solution.values()[grid]);
    println!("boundary residuals: |f(0)| = {r0:e}, |int f - f'(0)| = {r1:.3e}");
    for note in &sol.notes {
        println!("note: {note}");
    }
    if let Some(path) = args.out {
        emit(&path, &grid_csv(&sol.solution), force)?;
    }
    write_trace(
        r,
        "FDE Picard residuals (sup norm)",
        args.trace,
        args.svg,
        force,
    )?;
    Ok(0)
}

fn print_oracle(report: &OracleReport) {
    println!(
        "{:>3} {:>9} {:>6} {:>12} {:>12} {:>10} {:>15}",
        "n", "g_max", "rels", "instances", "hypotheses", "filtered", "counterexamples"
    );
    for s in &report.sweeps {
        println!(
            "{:>3} {:>9} {:>6} {:>12} {:>12} {:>10} {:>15}",
            s.sweep.n,
            s.sweep.g_max,
            s.relations,
            s.instances_checked,
            s.hypotheses_satisfied,
            s.uniqueness_filtered,
            s.counterexamples.len()
        );
    }
    for r in &report.readings {
        println!("reading: {r}");
    }
}

fn oracle(args: OracleArgs, force: bool) -> Outcome {
    let sweeps = match args.n {
        None => default_sweeps(),
        Some(n) => {
            let mut s = default_sweep(n as usize);
            if let Some(g) = args.g_max {
                if g < 0 {
                    return Err(Failure::usage("--g-max must be non-negative"));
                }
                s.g_max = g;
            }
            if let Some(cap) = args.rel_cap {
                s = Sweep::capped(s.n, s.g_max, cap);
            }
            vec![s]
        }
    };
    let report = run_oracle(&sweeps).map_err(|e| Failure::usage(e.to_string()))?;
    print_oracle(&report);
    if let Some(path) = args.out {
        emit(&path, &pretty(&report), force)?;
    }
    let count = report.counterexample_count();
    if count > 0 {
        for c in report
            .sweeps
            .iter()
            .flat_map(|s| &s.counterexamples)
            .take(5)
        {
            println!(
                "counterexample {:?} at index {}: {}",
                c.kind,
                c.index,
                serde_json::to_string(&c.instance).unwrap()
            );
        }
        return Ok(3);
    }
    Ok(0)
}

fn example(args: ExampleArgs, force: bool) -> Outcome {
    let which = args.which.unwrap_or(1);
    let n = args.n.unwrap_or(30);
    if n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    let trace = if which == 1 {
        example1_run(1.0, n)
    } else {
        example2_run(0.0, 1.0, n)
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    println!("example {which} from (0, 1), {} steps", trace.steps());
    println!(
        "final point: ({:e}, {:e})",
        trace.last().first,
        trace.last().second
    );
    println!(
        "preserved: {}, certified start: {}",
        trace.preserved, trace.certified
    );
    let title = format!("Example {which}: residual |g(r_n, r_n+1)|");
    write_trace(&trace.residuals, &title, args.out, args.svg, force)?;
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    let config: Option<Value> = cli.config.as_deref().map(read_json).transpose()?;
    let force = cli.force;
    match cli.command {
        Command::Verify(a) => verify(merge(a, &config)?, force),
        Command::Iterate(a) => iterate_cmd(merge(a, &config)?, force),
        Command::SolveFde(a) => solve(merge(a, &config)?, force),
        Command::Oracle(a) => oracle(merge(a, &config)?, force),
        Command::Example(a) => example(merge(a, &config)?, force),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
