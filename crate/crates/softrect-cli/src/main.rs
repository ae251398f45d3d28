//! Command-line front end: instance generation, solving, model export,
//! solution checking, evaluation, benchmarking, and SVG rendering.
//!
//! Exit codes: 0 success or feasible, 1 infeasible or violated,
//! 2 usage error, 3 input validation error, 4 time limit reached with
//! an unproven result.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use softrect::domain::{evaluate, realize, ObjectiveKind, Partition};
use softrect::exact::{
    brute_force, solve_aspect_binary_search, solve_aspect_exact_bb, solve_peri_max_bb,
    SearchStatus, SearchStats,
};
use softrect::instances::{generate, read_instance, write_instance, GeneratorConfig, InstanceClass};
use softrect::mip::{
    build_aspect_decision_model, build_aspect_reform_model, build_peri_max_model, check_solution,
    emit_lp, parse_solution, LinearModel, ModelKind,
};
use softrect::report::{render_svg, run_bench, RenderOptions, SolverId};
use softrect::scalar::{format_rational, rational_to_f64, Rational};
use softrect::clws::solve_peri_sum;

const EXIT_OK: u8 = 0;
const EXIT_INFEASIBLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_TIME_LIMIT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "softrect",
    version,
    about = "Partition a rectangle into soft rectangles of prescribed areas with two-stage guillotine cuts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance
    Gen(GenArgs),
    /// Solve an instance for one objective
    Solve(SolveArgs),
    /// Build a mixed-integer model and write LP + metadata files
    ExportMip(ExportArgs),
    /// Check a solution file against an exported model
    Check(CheckArgs),
    /// Evaluate a given partition under an objective
    Eval(EvalArgs),
    /// Run solvers over an instance directory and write a CSV report
    Bench(BenchArgs),
    /// Render a partition as SVG
    Render(RenderArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Instance class: U, MU or MN
    #[arg(long, value_parser = parse_class)]
    class: InstanceClass,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Objective: peri-sum, peri-max or aspect
    #[arg(long, value_parser = parse_objective)]
    objective: ObjectiveKind,
    /// Method: clws, bb, binsearch or brute (defaults per objective)
    #[arg(long)]
    method: Option<String>,
    /// Time limit in seconds
    #[arg(long)]
    time_limit: Option<f64>,
    /// Emit a machine-readable result object
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Model: peri-max, aspect-reform or aspect-decision
    #[arg(long, value_parser = parse_model_kind)]
    model: ModelKind,
    /// Aspect threshold (aspect-decision only)
    #[arg(long)]
    phi: Option<f64>,
    /// Append symmetry cuts (peri-max only)
    #[arg(long)]
    cuts: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// Model metadata file written by export-mip (.lp.meta.json)
    #[arg(long)]
    model: PathBuf,
    /// Solution file with one "name value" pair per line
    #[arg(long)]
    solution: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Partition file: JSON array of arrays of 1-based indices
    #[arg(long)]
    partition: PathBuf,
    #[arg(long, value_parser = parse_objective)]
    objective: ObjectiveKind,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance JSON files
    #[arg(long)]
    dir: PathBuf,
    /// Comma-separated solver list (default: all)
    #[arg(long)]
    solvers: Option<String>,
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    /// Concurrent rows
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Pixel width of the drawing
    #[arg(long, default_value_t = 640.0)]
    width: f64,
    /// Skip the per-cell area labels
    #[arg(long)]
    no_labels: bool,
}

fn parse_class(s: &str) -> Result<InstanceClass, String> {
    s.parse()
}

fn parse_model_kind(s: &str) -> Result<ModelKind, String> {
    s.parse()
}

fn parse_objective(s: &str) -> Result<ObjectiveKind, String> {
    match s {
        "peri-sum" => Ok(ObjectiveKind::PeriSum),
        "peri-max" => Ok(ObjectiveKind::PeriMax),
        "aspect" => Ok(ObjectiveKind::AspectRatio),
        other => Err(format!(
            "unknown objective {other:?} (use peri-sum, peri-max or aspect)"
        )),
    }
}

fn usage_error(message: &str) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn input_error(err: impl std::fmt::Display) -> u8 {
    eprintln!("error: {err}");
    EXIT_INPUT
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::ExportMip(args) => cmd_export(args),
        Command::Check(args) => cmd_check(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Render(args) => cmd_render(args),
    };
    ExitCode::from(code)
}

fn cmd_gen(args: GenArgs) -> u8 {
    let config = GeneratorConfig {
        class: args.class,
        n: args.n,
        seed: args.seed,
    };
    let instance = match generate(&config) {
        Ok(i) => i,
        Err(err) => return input_error(err),
    };
    match write_instance(&instance, &args.out) {
        Ok(()) => {
            println!("wrote {}", args.out.display());
            EXIT_OK
        }
        Err(err) => input_error(err),
    }
}

struct SolveOutcome {
    partition: Partition,
    value: Rational,
    stats: SearchStats,
    iterations: Option<usize>,
}

fn cmd_solve(args: SolveArgs) -> u8 {
    let method = args.method.as_deref().unwrap_or(match args.objective {
        ObjectiveKind::PeriSum => "clws",
        ObjectiveKind::PeriMax => "bb",
        ObjectiveKind::AspectRatio => "binsearch",
        ObjectiveKind::AspectSurrogate => "brute",
    });
    let allowed = match args.objective {
        ObjectiveKind::PeriSum => ["clws", "brute"].as_slice(),
        ObjectiveKind::PeriMax => ["bb", "brute"].as_slice(),
        ObjectiveKind::AspectRatio => ["binsearch", "bb", "brute"].as_slice(),
        ObjectiveKind::AspectSurrogate => ["brute"].as_slice(),
    };
    if !allowed.contains(&method) {
        return usage_error(&format!(
            "method {method:?} is incompatible with objective {} (allowed: {})",
            args.objective,
            allowed.join(", ")
        ));
    }
    let instance = match read_instance(&args.input) {
        Ok(i) => i,
        Err(err) => return input_error(err),
    };
    let limit = args.time_limit.map(Duration::from_secs_f64);
    let started = std::time::Instant::now();

    let exact_value = |partition: &Partition| -> Rational {
        let layout = realize(&instance, partition).expect("solver output is valid");
        evaluate(&layout, args.objective)
            .as_exact()
            .expect("ratio objectives are rational")
            .clone()
    };

    let outcome = match (method, args.objective) {
        ("clws", _) => solve_peri_sum(&instance).map(|(partition, value)| SolveOutcome {
            stats: SearchStats {
                nodes: 0,
                elapsed: started.elapsed().as_secs_f64(),
                bound_lb: rational_to_f64(&value),
                bound_ub: rational_to_f64(&value),
                status: SearchStatus::Optimal,
            },
            value,
            partition,
            iterations: None,
        }),
        ("bb", ObjectiveKind::PeriMax) => {
            solve_peri_max_bb(&instance, limit, None).map(|(partition, stats)| SolveOutcome {
                value: exact_value(&partition),
                partition,
                stats,
                iterations: None,
            })
        }
        ("bb", ObjectiveKind::AspectRatio) => {
            solve_aspect_exact_bb(&instance, limit).map(|(partition, stats)| SolveOutcome {
                value: exact_value(&partition),
                partition,
                stats,
                iterations: None,
            })
        }
        ("binsearch", _) => solve_aspect_binary_search(&instance, limit).map(|o| SolveOutcome {
            partition: o.partition,
            value: o.value,
            stats: o.stats,
            iterations: Some(o.trace.iterations.len()),
        }),
        ("brute", _) => brute_force(&instance, args.objective).map(|(partition, value)| {
            SolveOutcome {
                stats: SearchStats {
                    nodes: 0,
                    elapsed: started.elapsed().as_secs_f64(),
                    bound_lb: value.to_f64(),
                    bound_ub: value.to_f64(),
                    status: SearchStatus::Optimal,
                },
                value: value.as_exact().expect("ratio objectives").clone(),
                partition,
                iterations: None,
            }
        }),
        _ => unreachable!("method list is validated above"),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(err) => return input_error(err),
    };

    let partition_json = outcome.partition.to_one_based();
    if args.json {
        let mut stats = json!({
            "nodes": outcome.stats.nodes,
            "time_s": outcome.stats.elapsed,
            "lb": outcome.stats.bound_lb,
            "ub": outcome.stats.bound_ub,
            "status": outcome.stats.status.to_string(),
        });
        if let Some(iters) = outcome.iterations {
            stats["iterations"] = json!(iters);
        }
        let result = json!({
            "objective": args.objective.to_string(),
            "method": method,
            "value": rational_to_f64(&outcome.value),
            "value_exact": format_rational(&outcome.value),
            "partition": partition_json,
            "stats": stats,
        });
        println!("{result}");
    } else {
        println!("objective: {}", args.objective);
        println!("method: {method}");
        println!(
            "value: {} ({})",
            format_rational(&outcome.value),
            rational_to_f64(&outcome.value)
        );
        println!("partition: {}", serde_json::to_string(&partition_json).expect("plain lists"));
        if let Some(iters) = outcome.iterations {
            println!("iterations: {iters}");
            println!(
                "bracket: [{}, {}] (guarantee 0.01)",
                outcome.stats.bound_lb, outcome.stats.bound_ub
            );
        }
        println!(
            "nodes: {}, time: {:.3}s, status: {}",
            outcome.stats.nodes, outcome.stats.elapsed, outcome.stats.status
        );
    }
    if outcome.stats.status == SearchStatus::TimeLimit {
        EXIT_TIME_LIMIT
    } else {
        EXIT_OK
    }
}

fn cmd_export(args: ExportArgs) -> u8 {
    if args.cuts && args.model != ModelKind::PeriMax {
        return usage_error("--cuts applies only to the peri-max model");
    }
    if args.phi.is_some() && args.model != ModelKind::AspectDecision {
        return usage_error("--phi applies only to the aspect-decision model");
    }
    let instance = match read_instance(&args.input) {
        Ok(i) => i,
        Err(err) => return input_error(err),
    };
    let model = match args.model {
        ModelKind::PeriMax => build_peri_max_model(&instance, args.cuts),
        ModelKind::AspectReform => build_aspect_reform_model(&instance),
        ModelKind::AspectDecision => {
            let Some(phi) = args.phi else {
                return usage_error("aspect-decision requires --phi");
            };
            build_aspect_decision_model(&instance, phi)
        }
    };
    let model = match model {
        Ok(m) => m,
        Err(err) => return input_error(err),
    };
    let meta_path = meta_path_for(&args.out);
    let meta = serde_json::to_string_pretty(&model).expect("model serializes");
    if let Err(err) = std::fs::write(&args.out, emit_lp(&model)) {
        return input_error(err);
    }
    if let Err(err) = std::fs::write(&meta_path, meta) {
        return input_error(err);
    }
    println!("wrote {} and {}", args.out.display(), meta_path.display());
    EXIT_OK
}

fn meta_path_for(lp_path: &Path) -> PathBuf {
    let mut s = lp_path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn cmd_check(args: CheckArgs) -> u8 {
    let model: LinearModel = match std::fs::read_to_string(&args.model)
        .map_err(softrect::Error::from)
        .and_then(|text| serde_json::from_str(&text).map_err(softrect::Error::from))
    {
        Ok(m) => m,
        Err(err) => return input_error(err),
    };
    let assignment = match std::fs::read_to_string(&args.solution)
        .map_err(softrect::Error::from)
        .and_then(|text| parse_solution(&text))
    {
        Ok(a) => a,
        Err(err) => return input_error(err),
    };
    match check_solution(&model, &assignment, args.tolerance) {
        Ok(violations) if violations.is_empty() => {
            println!("feasible ({} constraints)", model.constraints().len());
            EXIT_OK
        }
        Ok(violations) => {
            println!("{} violation(s):", violations.len());
            for v in &violations {
                println!("  {v}");
            }
            EXIT_INFEASIBLE
        }
        Err(err) => input_error(err),
    }
}

fn read_partition_file(path: &Path) -> Result<Partition, softrect::Error> {
    let text = std::fs::read_to_string(path)?;
    let layers: Vec<Vec<usize>> = serde_json::from_str(&text)?;
    Partition::from_one_based(layers)
}

fn cmd_eval(args: EvalArgs) -> u8 {
    let instance = match read_instance(&args.input) {
        Ok(i) => i,
        Err(err) => return input_error(err),
    };
    let partition = match read_partition_file(&args.partition) {
        Ok(p) => p,
        Err(err) => return input_error(err),
    };
    let layout = match realize(&instance, &partition) {
        Ok(l) => l,
        Err(err) => return input_error(err),
    };
    let value = evaluate(&layout, args.objective);
    let exact = value
        .as_exact()
        .expect("ratio objectives are rational")
        .clone();
    if args.json {
        let result = json!({
            "objective": args.objective.to_string(),
            "value": rational_to_f64(&exact),
            "value_exact": format_rational(&exact),
            "partition": partition.canonicalize().to_one_based(),
        });
        println!("{result}");
    } else {
        println!(
            "value: {} ({})",
            format_rational(&exact),
            rational_to_f64(&exact)
        );
    }
    EXIT_OK
}

fn cmd_bench(args: BenchArgs) -> u8 {
    let solvers: Vec<SolverId> = match &args.solvers {
        None => SolverId::ALL.to_vec(),
        Some(list) => {
            let mut out = Vec::new();
            for name in list.split(',') {
                match name.trim().parse::<SolverId>() {
                    Ok(s) => out.push(s),
                    Err(err) => return usage_error(&err),
                }
            }
            out
        }
    };
    let mut paths: Vec<PathBuf> = match std::fs::read_dir(&args.dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect(),
        Err(err) => return input_error(err),
    };
    paths.sort();
    let mut instances = Vec::new();
    for path in &paths {
        match read_instance(path) {
            Ok(i) => instances.push(i),
            Err(err) => return input_error(format!("{}: {err}", path.display())),
        }
    }
    let limit = args.time_limit.map(Duration::from_secs_f64);
    let (rows, csv) = run_bench(&instances, &solvers, limit, args.jobs);
    if let Err(err) = std::fs::write(&args.out, csv) {
        return input_error(err);
    }
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    EXIT_OK
}

fn cmd_render(args: RenderArgs) -> u8 {
    let instance = match read_instance(&args.input) {
        Ok(i) => i,
        Err(err) => return input_error(err),
    };
    let partition = match read_partition_file(&args.partition) {
        Ok(p) => p,
        Err(err) => return input_error(err),
    };
    let layout = match realize(&instance, &partition) {
        Ok(l) => l,
        Err(err) => return input_error(err),
    };
    let svg = render_svg(
        &layout,
        &RenderOptions {
            width_px: args.width,
            labels: !args.no_labels,
        },
    );
    if let Err(err) = std::fs::write(&args.out, svg) {
        return input_error(err);
    }
    println!("wrote {}", args.out.display());
    EXIT_OK
}
