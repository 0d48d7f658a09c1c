//! Command-line surface: cone sweeps, gap tables, bath simulations and the
//! verification suite, with deterministic CSV/JSON/SVG output.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tocone::acceptance::{run_criteria, AcceptanceConfig, CriterionGroup};
use tocone::bath::{bath_delta_report, make_bath, Scheme};
use tocone::ento::sweep_cone;
use tocone::gap::{empirical_gap, q_is_certifiable, sweep_gap, SamplePattern};
use tocone::Error;

use output::{fmt_f64, write_cone_svg, OutputWriter};

const EXIT_VERIFICATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tocone",
    about = "State-conversion cones and coherence-gap certification for a qutrit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the reachable-state cone over the output-population lattice.
    Cone(ConeArgs),
    /// Tabulate the point-(b) closed forms and perturbation bounds.
    Gap(GapArgs),
    /// Sample bath unitaries and record their induced channels.
    Simulate(SimulateArgs),
    /// Run the acceptance criteria and print a pass/fail table.
    Verify(VerifyArgs),
}

/// Record serialization of the data-producing commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum RecordFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct ConeArgs {
    /// Boltzmann ratio exp(-beta * spacing), in (0, 1)
    #[arg(long)]
    q: f64,
    /// lattice points per population axis
    #[arg(long, default_value_t = 50)]
    grid: usize,
    /// output path
    #[arg(long)]
    out: PathBuf,
    /// record serialization: csv or json
    #[arg(long, value_enum, default_value_t = RecordFormat::Csv)]
    format: RecordFormat,
    /// optional SVG heatmap path
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct GapArgs {
    /// q values (repeatable); empty list emits a header-only file
    #[arg(long = "q")]
    q: Vec<f64>,
    /// epsilon values (repeatable)
    #[arg(long = "epsilon", default_values_t = vec![0.0])]
    epsilon: Vec<f64>,
    /// delta values (repeatable)
    #[arg(long = "delta", default_values_t = vec![0.0])]
    delta: Vec<f64>,
    /// output path
    #[arg(long)]
    out: PathBuf,
    /// record serialization: csv or json
    #[arg(long, value_enum, default_value_t = RecordFormat::Csv)]
    format: RecordFormat,
    /// optional metadata JSON path
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Boltzmann ratio exp(-beta * spacing), in (0, 1)
    #[arg(long)]
    q: f64,
    /// highest bath level K
    #[arg(long = "bath-k")]
    bath_k: usize,
    /// geometric degeneracy base (d_n = round(base^n))
    #[arg(long = "bath-base")]
    bath_base: f64,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// acceptance window around the point-(b) entries (G00, G11)
    #[arg(long, default_value_t = 0.25)]
    window: f64,
    /// unitary family: haar or point-b
    #[arg(long, default_value = "haar")]
    pattern: String,
    /// output path
    #[arg(long)]
    out: PathBuf,
    /// record serialization: csv or json
    #[arg(long, value_enum, default_value_t = RecordFormat::Csv)]
    format: RecordFormat,
    /// metadata JSON path (defaults to <out>.meta.json)
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// criterion subset: all, cone, gap or bath
    #[arg(long, default_value = "all")]
    criteria: String,
    /// self-test: flip one tolerance to zero so the suite must fail
    #[arg(long, hide = true)]
    self_test_force_fail: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Cone(args) => run_cone(args),
        Command::Gap(args) => run_gap(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Verify(args) => return run_verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

enum CliError {
    Core(Error),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn exit_code_for(e: &CliError) -> u8 {
    match e {
        CliError::Core(Error::Domain(_)) | CliError::Core(Error::Argument(_)) => EXIT_USAGE,
        _ => EXIT_RESOURCE,
    }
}

fn run_cone(args: ConeArgs) -> Result<(), CliError> {
    let records = sweep_cone(args.q, args.grid)?;
    match args.format {
        RecordFormat::Csv => {
            let mut w = OutputWriter::create(&args.out)?;
            w.line("q,p0,p1,feasible,rho10_max,case_id,g00_star,g11_star")?;
            for r in &records {
                w.line(&format!(
                    "{},{},{},{},{},{},{},{}",
                    fmt_f64(r.q),
                    fmt_f64(r.p0),
                    fmt_f64(r.p1),
                    r.feasible(),
                    fmt_f64(r.rho10_max),
                    r.case_id.as_str(),
                    fmt_f64(r.g00_star),
                    fmt_f64(r.g11_star),
                ))?;
            }
            w.finish()?;
        }
        RecordFormat::Json => {
            let rows: Vec<serde_json::Value> = records
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "q": r.q,
                        "p0": r.p0,
                        "p1": r.p1,
                        "feasible": r.feasible(),
                        "rho10_max": r.rho10_max,
                        "case_id": r.case_id.as_str(),
                        "g00_star": r.g00_star,
                        "g11_star": r.g11_star,
                    })
                })
                .collect();
            write_json(&args.out, &serde_json::Value::Array(rows))?;
        }
    }
    if let Some(svg) = &args.svg {
        write_cone_svg(&records, args.grid, svg)?;
    }
    Ok(())
}

fn write_json(path: &Path, doc: &serde_json::Value) -> std::io::Result<()> {
    std::fs::write(path, format!("{}\n", serde_json::to_string_pretty(doc).unwrap()))
}

fn run_gap(args: GapArgs) -> Result<(), CliError> {
    let records = sweep_gap(&args.q, &args.epsilon, &args.delta)?;
    match args.format {
        RecordFormat::Csv => {
            let mut w = OutputWriter::create(&args.out)?;
            w.line("q,epsilon,delta,ento_max,to_max,delta10,bound_main,bound_refined,f_q,certified")?;
            for r in &records {
                w.line(&format!(
                    "{},{},{},{},{},{},{},{},{},{}",
                    fmt_f64(r.q),
                    fmt_f64(r.epsilon),
                    fmt_f64(r.delta),
                    fmt_f64(r.ento_max),
                    fmt_f64(r.to_max),
                    fmt_f64(r.delta10),
                    fmt_f64(r.bound_main),
                    fmt_f64(r.bound_refined),
                    fmt_f64(r.f_q),
                    r.certified(),
                ))?;
            }
            w.finish()?;
        }
        RecordFormat::Json => {
            let rows: Vec<serde_json::Value> = records
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "q": r.q,
                        "epsilon": r.epsilon,
                        "delta": r.delta,
                        "ento_max": r.ento_max,
                        "to_max": r.to_max,
                        "delta10": r.delta10,
                        "bound_main": r.bound_main,
                        "bound_refined": r.bound_refined,
                        "f_q": r.f_q,
                        "certified": r.certified(),
                    })
                })
                .collect();
            write_json(&args.out, &serde_json::Value::Array(rows))?;
        }
    }

    let warnings: Vec<String> = args
        .q
        .iter()
        .filter(|&&q| !q_is_certifiable(q))
        .map(|&q| {
            format!(
                "q = {q} is outside (0, (sqrt(5)-1)/2); 1 - q - q^2 <= 0 and the main bound is vacuous"
            )
        })
        .collect();
    for wline in &warnings {
        eprintln!("warning: {wline}");
    }
    if let Some(meta) = &args.meta {
        let doc = serde_json::json!({
            "command": "gap",
            "note": "bound_refined is first order in epsilon; O(epsilon^2) terms are dropped",
            "warnings": warnings,
            "rows": records.len(),
        });
        write_json(meta, &doc)?;
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let pattern = match args.pattern.as_str() {
        "haar" => SamplePattern::Haar,
        "point-b" => SamplePattern::PointB,
        other => {
            return Err(CliError::Core(Error::Domain(format!(
                "unknown pattern '{other}' (expected haar or point-b)"
            ))))
        }
    };
    let bath = make_bath(args.q, args.bath_k, Scheme::Geometric(args.bath_base))?;
    let report = bath_delta_report(&bath)?;
    let summary = empirical_gap(&bath, args.samples, args.window, args.seed, pattern)?;

    match args.format {
        RecordFormat::Csv => {
            let mut w = OutputWriter::create(&args.out)?;
            w.line("sample,g00,g11,g01,g02,g10,g12,g20,g21,g22,rho10,bound_eq7,in_window")?;
            for s in &summary.samples {
                let g = &s.transition;
                w.line(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    s.index,
                    fmt_f64(g.entry(0, 0)),
                    fmt_f64(g.entry(1, 1)),
                    fmt_f64(g.entry(0, 1)),
                    fmt_f64(g.entry(0, 2)),
                    fmt_f64(g.entry(1, 0)),
                    fmt_f64(g.entry(1, 2)),
                    fmt_f64(g.entry(2, 0)),
                    fmt_f64(g.entry(2, 1)),
                    fmt_f64(g.entry(2, 2)),
                    fmt_f64(s.rho10),
                    fmt_f64(s.bound_eq7),
                    s.in_window,
                ))?;
            }
            w.finish()?;
        }
        RecordFormat::Json => {
            let rows: Vec<serde_json::Value> = summary
                .samples
                .iter()
                .map(|s| {
                    let g = &s.transition;
                    serde_json::json!({
                        "sample": s.index,
                        "g00": g.entry(0, 0),
                        "g11": g.entry(1, 1),
                        "g01": g.entry(0, 1),
                        "g02": g.entry(0, 2),
                        "g10": g.entry(1, 0),
                        "g12": g.entry(1, 2),
                        "g20": g.entry(2, 0),
                        "g21": g.entry(2, 1),
                        "g22": g.entry(2, 2),
                        "rho10": s.rho10,
                        "bound_eq7": s.bound_eq7,
                        "in_window": s.in_window,
                    })
                })
                .collect();
            write_json(&args.out, &serde_json::Value::Array(rows))?;
        }
    }

    let meta_path = args
        .meta
        .unwrap_or_else(|| PathBuf::from(format!("{}.meta.json", args.out.display())));
    let doc = serde_json::json!({
        "command": "simulate",
        "q": args.q,
        "bath": {
            "max_level": bath.max_level(),
            "scheme": bath.scheme().label(),
            "degeneracies": bath.degeneracies(),
            "z_r": bath.z_r(),
        },
        "delta_report": {
            "good_levels": report.good_levels,
            "delta_ratio": report.delta_ratio,
            "delta_tail": report.delta_tail,
            "positivity_margin": report.positivity_margin,
            "gap_guarantee_holds": report.gap_guarantee_holds(args.q),
        },
        "seed": args.seed,
        "pattern": args.pattern,
        "samples": summary.n_samples,
        "window": args.window,
        "in_window": summary.n_filtered,
        "eps_eff": summary.eps_eff,
        "delta_eff": summary.delta_eff,
        "observed_max": summary.observed_max,
        "bound_main": summary.bound_main,
        "within_bound": summary.within_bound,
    });
    write_json(&meta_path, &doc)?;
    Ok(())
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    let Some(group) = CriterionGroup::parse(&args.criteria) else {
        eprintln!(
            "error: unknown criteria group '{}' (expected all, cone, gap or bath)",
            args.criteria
        );
        return ExitCode::from(EXIT_USAGE);
    };
    let config = AcceptanceConfig { forced_failure: args.self_test_force_fail };
    let results = run_criteria(group, config);
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFICATION)
    }
}
