use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qkp_core::bench::{run_bench, BenchParams};
use qkp_core::decompose::decompose;
use qkp_core::generate::{generate, GenParams};
use qkp_core::instance::SolutionDoc;
use qkp_core::oracle::DEFAULT_MAX_N;
use qkp_core::preprocess::prepare;
use qkp_core::rational::{format_rational, parse_rational};
use qkp_core::{evaluate, solve, DksChoice, QkpError, QkpInstance, Rational, SolveConfig};

#[derive(Parser)]
#[command(name = "qkp", version, about = "Approximate quadratic knapsack solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file, or every *.json file in a directory.
    Solve(SolveArgs),
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Compare the solver against the exact oracle on random instances.
    Bench(BenchArgs),
    /// Check a solution file against its instance.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    /// Solution file (directory in batch mode). Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DksChoice::Greedy)]
    dks: DksChoice,
    #[arg(long, value_parser = parse_rational_arg, default_value = "1/4")]
    eps: Rational,
    #[arg(long, value_parser = parse_rational_arg)]
    alpha: Option<Rational>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Dump the prepared instance and its sub-instances.
    #[arg(long)]
    decomposition: Option<PathBuf>,
    /// Include wall time in the report.
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 10)]
    max_cost: u64,
    #[arg(long, default_value_t = 10)]
    max_profit: u64,
    #[arg(long, value_parser = parse_rational_arg, default_value = "1/2")]
    limit_frac: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Inclusive vertex-count range, `LO-HI` or a single value.
    #[arg(long, value_parser = parse_range, default_value = "4-12")]
    n_range: (usize, usize),
    #[arg(long, default_value_t = DksChoice::Exact)]
    dks: DksChoice,
    #[arg(long, value_parser = parse_rational_arg, default_value = "1/4")]
    eps: Rational,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 10)]
    max_cost: u64,
    #[arg(long, default_value_t = 10)]
    max_profit: u64,
    #[arg(long, value_parser = parse_rational_arg, default_value = "1/2")]
    limit_frac: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the rows as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s.split_once('-').unwrap_or((s, s));
    let lo = lo
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("bad range start: {e}"))?;
    let hi = hi
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("bad range end: {e}"))?;
    if lo > hi {
        return Err(format!("range {lo}-{hi} is empty"));
    }
    Ok((lo, hi))
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<QkpError> for Failure {
    fn from(e: QkpError) -> Self {
        let code = match e {
            QkpError::Input(_) | QkpError::Invalid(_) | QkpError::Json(_) | QkpError::Io(_) => 2,
            QkpError::Capacity(_) | QkpError::Internal(_) => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(3, format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn load_instance(path: &Path) -> Result<QkpInstance, Failure> {
    QkpInstance::from_json(&read(path)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let cfg = SolveConfig {
        dks: args.dks,
        knapsack_eps: args.eps.clone(),
        alpha_override: args.alpha.clone(),
        seed: args.seed,
        ..SolveConfig::default()
    };
    cfg.validate()?;

    if args.input.is_dir() {
        let out_dir = args
            .output
            .as_deref()
            .ok_or_else(|| fail(2, "batch mode needs --output <directory>"))?;
        fs::create_dir_all(out_dir).map_err(|e| fail(3, format!("{}: {e}", out_dir.display())))?;
        let mut files: Vec<PathBuf> = fs::read_dir(&args.input)
            .map_err(|e| fail(2, format!("{}: {e}", args.input.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        for file in files {
            let inst = load_instance(&file)?;
            let (sol, _) = solve(&inst, &cfg)?;
            let stem = file.file_stem().unwrap_or_default().to_string_lossy();
            write(
                &out_dir.join(format!("{stem}.solution.json")),
                &sol.to_canonical_json(),
            )?;
        }
        return Ok(());
    }

    let inst = load_instance(&args.input)?;
    if let Some(path) = &args.decomposition {
        let prep = prepare(&inst);
        let subs = decompose(&prep);
        let doc = json!({
            "reduced_vertices": prep.reduced.n(),
            "base_profit": format_rational(&prep.base_profit),
            "always_include": prep.always_include,
            "orig_of": prep.orig_of,
            "bucket_of": (0..prep.reduced.n()).map(|v| prep.bucket_of(v)).collect::<Vec<_>>(),
            "subinstances": subs.iter().map(|s| s.to_json(&prep)).collect::<Vec<_>>(),
        });
        write(path, &pretty(&doc))?;
    }
    let (sol, report) = solve(&inst, &cfg)?;
    emit(args.output.as_deref(), &sol.to_canonical_json())?;
    if let Some(path) = &args.report {
        write(path, &pretty(&report.to_json(args.timing)))?;
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let inst = generate(&GenParams {
        n: args.n,
        density: args.density,
        max_cost: args.max_cost,
        max_profit: args.max_profit,
        limit_frac: args.limit_frac,
        seed: args.seed,
    })?;
    emit(args.output.as_deref(), &inst.to_canonical_json())
}

fn oracle_max_n() -> Result<usize, Failure> {
    match std::env::var("QKP_ORACLE_MAX_N") {
        Ok(v) => v.trim().parse().map_err(|_| {
            fail(
                2,
                format!("QKP_ORACLE_MAX_N must be a vertex count, got {v:?}"),
            )
        }),
        Err(_) => Ok(DEFAULT_MAX_N),
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let params = BenchParams {
        trials: args.trials,
        n_range: args.n_range,
        dks: args.dks,
        knapsack_eps: args.eps,
        density: args.density,
        max_cost: args.max_cost,
        max_profit: args.max_profit,
        limit_frac: args.limit_frac,
        seed: args.seed,
        oracle_max_n: oracle_max_n()?,
    };
    let report = run_bench(&params)?;
    print!("{}", report.to_table());
    if let Some(mean) = report.mean_ratio() {
        println!("mean ratio {mean:.4} over {} trials", report.rows.len());
    }
    if let Some(path) = &args.json {
        write(path, &pretty(&report.to_json()))?;
    }
    let bad = report.floor_violations();
    if args.dks == DksChoice::Exact && !bad.is_empty() {
        let which: Vec<String> = bad
            .iter()
            .map(|r| format!("n={} seed={}", r.n, r.seed))
            .collect();
        return Err(fail(
            1,
            format!("ratio below the guaranteed floor: {}", which.join(", ")),
        ));
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let inst = load_instance(&args.input)?;
    let text = read(&args.solution)?;
    let doc: SolutionDoc = serde_json::from_str(&text)
        .map_err(|e| fail(2, format!("{}: {e}", args.solution.display())))?;
    let (cost, profit) = evaluate(&inst, &doc.vertices).map_err(|e| fail(1, e.to_string()))?;
    let mut diff = Vec::new();
    if cost != doc.cost.0 {
        diff.push(format!(
            "cost: claimed {}, recomputed {}",
            doc.cost,
            format_rational(&cost)
        ));
    }
    if profit != doc.profit.0 {
        diff.push(format!(
            "profit: claimed {}, recomputed {}",
            doc.profit,
            format_rational(&profit)
        ));
    }
    if cost > *inst.limit() {
        diff.push(format!(
            "infeasible: cost {} exceeds limit {}",
            format_rational(&cost),
            format_rational(inst.limit())
        ));
    }
    if diff.is_empty() {
        println!(
            "ok: cost {}, profit {}",
            format_rational(&cost),
            format_rational(&profit)
        );
        Ok(())
    } else {
        Err(fail(1, diff.join("\n")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qkp: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
