//! `cobench`: run campaigns, check solutions, build references and
//! aggregate reports.
//!
//! Exit codes: 0 success, 1 infeasible or unparseable solution (and other
//! runtime failures), 2 configuration error, 3 model endpoint failure.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cobench_core::llm::{estimate_cost, HttpClient, ModelClient, ModelEndpoint, Price, ReplayClient};
use cobench_core::log::LogError;
use cobench_core::metrics::{weighted_qyi, CSV_HEADER};
use cobench_core::problems::{AssessError, Assessment};
use cobench_core::refs::{build_reference_costs, load_references, revalidate, write_references};
use cobench_core::suite::{bundled_refs, bundled_root};
use cobench_core::{
    adapter, compute_report, run_campaign, CampaignConfig, CampaignError, CampaignLog, MetricsReport, ProblemId, Runner,
    Stage, Suite,
};

use config::FileConfig;

#[derive(Parser)]
#[command(name = "cobench", version, about = "Evaluate generated heuristics on combinatorial optimization problems")]
struct Cli {
    /// Key-value file predefining any long flag (`iterations = 5`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an iterative campaign against a model or a replay file.
    Run(Box<RunArgs>),
    /// Check a solution file; prints `OK` or one violation per line.
    Verify(CheckArgs),
    /// Check a solution file and print its cost.
    Evaluate(CheckArgs),
    /// Solve one instance with the reference solver.
    Baseline(BaselineArgs),
    /// Build (or check) reference costs for the suite.
    Refs(RefsArgs),
    /// Aggregate metrics over one or more campaign logs.
    Report(ReportArgs),
    /// List the registered problems.
    List(ListArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderArg {
    Openai,
    Anthropic,
}

impl std::str::FromStr for ProviderArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <ProviderArg as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    problem: Option<String>,
    /// Model name at the endpoint.
    #[arg(long, conflicts_with = "replay")]
    model: Option<String>,
    /// JSON array of canned responses, used instead of a model.
    #[arg(long)]
    replay: Option<PathBuf>,
    #[arg(long, value_enum)]
    provider: Option<ProviderArg>,
    #[arg(long)]
    base_url: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long)]
    api_key_env: Option<String>,
    #[arg(long)]
    iterations: Option<u32>,
    #[arg(long)]
    samples: Option<u32>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    demos: Option<usize>,
    /// Per-run timeout in seconds (default depends on the problem).
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    cores: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    suite: Option<PathBuf>,
    #[arg(long)]
    refs: Option<PathBuf>,
    /// Command template with {source} {input} {output} {shim} {workdir}.
    #[arg(long)]
    runner: Option<String>,
    /// USD per million input tokens, for the cost estimate.
    #[arg(long)]
    price_in: Option<f64>,
    #[arg(long)]
    price_out: Option<f64>,
    /// Report uncapped quality.
    #[arg(long)]
    uncapped: bool,
    /// Keep each run's working directory.
    #[arg(long)]
    keep_artifacts: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    instance: PathBuf,
    /// Write the solution here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RefsArgs {
    /// One problem; all problems when omitted.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    suite: Option<PathBuf>,
    #[arg(long)]
    refs: Option<PathBuf>,
    /// Re-validate stored references instead of rebuilding them.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(required = true)]
    logs: Vec<PathBuf>,
    #[arg(long)]
    refs: Option<PathBuf>,
    #[arg(long)]
    uncapped: bool,
    /// Directory for report.csv and report.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ListArgs {
    #[arg(long)]
    suite: Option<PathBuf>,
}

/// An error carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: e.into() }
}

fn runtime_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 1, error: e.into() }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let file = match &cli.config {
        Some(p) => match FileConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
        None => FileConfig::default(),
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(*a, &file),
        Command::Verify(a) => cmd_check(a, &file, false),
        Command::Evaluate(a) => cmd_check(a, &file, true),
        Command::Baseline(a) => cmd_baseline(a, &file),
        Command::Refs(a) => cmd_refs(a, &file),
        Command::Report(a) => cmd_report(a, &file),
        Command::List(a) => cmd_list(a, &file),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn problem(file: &FileConfig, cli: Option<String>) -> Result<ProblemId, Failure> {
    let name = file
        .or(cli, "problem")
        .map_err(config_err)?
        .ok_or_else(|| config_err(anyhow!("--problem is required; valid ids: {}", ProblemId::valid_ids())))?;
    name.parse().map_err(config_err)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(runtime_err)
}

fn cmd_run(a: RunArgs, file: &FileConfig) -> Outcome {
    let p = problem(file, a.problem)?;
    let c = |e: anyhow::Error| config_err(e);
    let replay: Option<PathBuf> = file.or(a.replay, "replay").map_err(c)?;
    let model: Option<String> = file.or(a.model, "model").map_err(c)?;
    let out: PathBuf = file.or(a.out, "out").map_err(c)?.unwrap_or_else(|| PathBuf::from("cobench-out"));
    let suite_dir: PathBuf = file.or(a.suite, "suite").map_err(c)?.unwrap_or_else(bundled_root);
    let refs_dir: PathBuf = file.or(a.refs, "refs").map_err(c)?.unwrap_or_else(bundled_refs);

    let (client, label): (Box<dyn ModelClient>, String) = match (replay, model) {
        (Some(path), _) => {
            let client = ReplayClient::from_file(&path)
                .with_context(|| format!("reading replay file {}", path.display()))
                .map_err(config_err)?;
            let name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            (Box::new(client), format!("replay:{name}"))
        }
        (None, Some(model)) => {
            let provider = file.or(a.provider, "provider").map_err(c)?.unwrap_or(ProviderArg::Openai);
            let base: Option<String> = file.or(a.base_url, "base-url").map_err(c)?;
            let key_env: Option<String> = file.or(a.api_key_env, "api-key-env").map_err(c)?;
            let endpoint = match provider {
                ProviderArg::Openai => ModelEndpoint::openai(
                    base.unwrap_or_else(|| "https://api.openai.com/v1".into()),
                    &model,
                    key_env.unwrap_or_else(|| "OPENAI_API_KEY".into()),
                ),
                ProviderArg::Anthropic => ModelEndpoint::anthropic(
                    base.unwrap_or_else(|| "https://api.anthropic.com/v1".into()),
                    &model,
                    key_env.unwrap_or_else(|| "ANTHROPIC_API_KEY".into()),
                ),
            };
            let prefix = match provider {
                ProviderArg::Openai => "openai",
                ProviderArg::Anthropic => "anthropic",
            };
            let label = format!("{prefix}:{model}");
            (Box::new(HttpClient::new(endpoint)), label)
        }
        (None, None) => return Err(config_err(anyhow!("one of --model or --replay is required"))),
    };

    let mut cfg = CampaignConfig::new(p, label);
    if let Some(v) = file.or(a.iterations, "iterations").map_err(c)? {
        cfg.iterations = v;
    }
    if let Some(v) = file.or(a.samples, "samples").map_err(c)? {
        cfg.samples_per_iteration = v;
    }
    if let Some(v) = file.or(a.temperature, "temperature").map_err(c)? {
        cfg.temperature = v;
    }
    cfg.num_demos = file.or(a.demos, "demos").map_err(c)?;
    if let Some(v) = file.or(a.timeout, "timeout").map_err(c)? {
        cfg.timeout_s = v;
    }
    if let Some(v) = file.or(a.cores, "cores").map_err(c)? {
        cfg.cpu_cores = v;
    }
    if let Some(v) = file.or(a.seed, "seed").map_err(c)? {
        cfg.seed = v;
    }
    cfg.validate().map_err(config_err)?;
    let price = match (file.or(a.price_in, "price-in").map_err(c)?, file.or(a.price_out, "price-out").map_err(c)?) {
        (Some(input_per_m), Some(output_per_m)) => Some(Price { input_per_m, output_per_m }),
        _ => None,
    };
    let capped = !file.flag(a.uncapped, "uncapped").map_err(c)?;
    let mut runner = match file.or::<String>(a.runner, "runner").map_err(c)? {
        Some(t) => Runner::from_template(&t),
        None => Runner::default(),
    };
    runner.keep_artifacts = file.flag(a.keep_artifacts, "keep-artifacts").map_err(c)?;

    let suite = Suite::load(&suite_dir, p).map_err(config_err)?;
    let refs = load_references(&refs_dir, p).map_err(config_err)?;
    fs::create_dir_all(&out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(runtime_err)?;

    let (log, failure) = match run_campaign(&cfg, client.as_ref(), &suite, &refs, &runner) {
        Ok(log) => (log, None),
        Err(CampaignError::Endpoint { source, partial }) => (*partial, Some(Failure { code: 3, error: source.into() })),
        Err(CampaignError::Config(e)) => return Err(config_err(e)),
        Err(e) => return Err(runtime_err(e)),
    };
    write(&out.join("log.json"), &log.to_json())?;
    if !log.iterations.is_empty() {
        let report = compute_report(&log, &refs, capped).map_err(runtime_err)?;
        write(&out.join("metrics.json"), &report.to_json())?;
        write(&out.join("metrics.csv"), &report.to_csv())?;
        println!("{p}: best QYI {:.4} at iteration {}", report.best_qyi, report.best_iteration);
        if let Some(e) = &report.eval {
            println!("{p}: eval QYI {:.4} (iteration {}, sample {})", e.score.qyi, e.iteration, e.sample);
        }
    }
    let usage: Vec<_> = log.iterations.iter().filter_map(|it| it.usage).collect();
    if !usage.is_empty() {
        if let Some(cost) = estimate_cost(&usage, price) {
            println!("estimated API cost: ${cost:.4}");
        }
    }
    match failure {
        Some(f) => Err(f),
        None => Ok(ExitCode::SUCCESS),
    }
}

fn cmd_check(a: CheckArgs, file: &FileConfig, print_cost: bool) -> Outcome {
    let p = problem(file, a.problem)?;
    let read = |path: &Path| {
        fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(config_err)
    };
    let (inst, sol) = (read(&a.instance)?, read(&a.solution)?);
    match adapter(p).assess(&inst, &sol) {
        Ok(Assessment::Feasible { cost }) => {
            if print_cost {
                println!("{cost:.6}");
            } else {
                println!("OK");
            }
            Ok(ExitCode::SUCCESS)
        }
        Ok(Assessment::Infeasible { violations }) => {
            for v in &violations {
                println!("{v}");
            }
            Ok(ExitCode::from(1))
        }
        Err(AssessError::Solution(e)) => {
            println!("solution does not parse: {e}");
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(config_err(e)),
    }
}

fn cmd_baseline(a: BaselineArgs, file: &FileConfig) -> Outcome {
    let p = problem(file, a.problem)?;
    let inst = fs::read_to_string(&a.instance)
        .with_context(|| format!("reading {}", a.instance.display()))
        .map_err(config_err)?;
    let run = match adapter(p).run_baseline(&inst) {
        Ok(r) => r,
        Err(AssessError::Instance(e)) => return Err(config_err(e)),
        Err(e) => return Err(runtime_err(e)),
    };
    match &a.out {
        Some(path) => write(path, &run.payload)?,
        None => print!("{}", run.payload),
    }
    eprintln!("{} cost {:.6}", run.solver, run.cost);
    Ok(ExitCode::SUCCESS)
}

fn cmd_refs(a: RefsArgs, file: &FileConfig) -> Outcome {
    let c = |e: anyhow::Error| config_err(e);
    let suite_dir: PathBuf = file.or(a.suite, "suite").map_err(c)?.unwrap_or_else(bundled_root);
    let refs_dir: PathBuf = file.or(a.refs, "refs").map_err(c)?.unwrap_or_else(bundled_refs);
    let problems = match file.or::<String>(a.problem, "problem").map_err(c)? {
        Some(name) => vec![name.parse::<ProblemId>().map_err(config_err)?],
        None => ProblemId::ALL.to_vec(),
    };
    for p in problems {
        let suite = Suite::load(&suite_dir, p).map_err(config_err)?;
        if a.check {
            let refs = revalidate(&refs_dir, &suite).map_err(runtime_err)?;
            println!("{p}: {} references re-validate", refs.costs.len());
        } else {
            let sols = build_reference_costs(&suite).map_err(runtime_err)?;
            write_references(&refs_dir, p, &sols).map_err(runtime_err)?;
            println!("{p}: wrote {} references", sols.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(a: ReportArgs, file: &FileConfig) -> Outcome {
    let refs_dir: PathBuf = file.or(a.refs, "refs").map_err(config_err)?.unwrap_or_else(bundled_refs);
    let capped = !file.flag(a.uncapped, "uncapped").map_err(config_err)?;
    let mut reports: Vec<MetricsReport> = Vec::new();
    for path in &a.logs {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(config_err)?;
        let log = CampaignLog::from_json(&text).map_err(|e| match e {
            LogError::Schema { .. } => config_err(anyhow!("{}: {e}; logs with mixed schema versions cannot be combined", path.display())),
            e => runtime_err(anyhow!("{}: {e}", path.display())),
        })?;
        let refs = load_references(&refs_dir, log.config.problem).map_err(config_err)?;
        reports.push(compute_report(&log, &refs, capped).map_err(|e| runtime_err(anyhow!("{}: {e}", path.display())))?);
    }

    let mut header = format!("{:<22} {:>3}", "problem", "N");
    for s in Stage::ALL {
        for i in [1, 5, 10] {
            header.push_str(&format!(" {:>7}", format!("{}@{i}", s.roman())));
        }
    }
    println!("{header} {:>8} {:>4}", "best_qyi", "iter");
    for r in &reports {
        let mut line = format!("{:<22} {:>3}", r.problem.as_str(), r.instances);
        for cell in &r.solve {
            line.push_str(&format!(" {:>7.4}", cell.value));
        }
        println!("{line} {:>8.4} {:>4}", r.best_qyi, r.best_iteration);
    }
    let pairs: Vec<(&MetricsReport, usize)> = reports.iter().map(|r| (r, r.instances)).collect();
    let weighted = weighted_qyi(&pairs).map_err(runtime_err)?;
    println!("weighted QYI: {weighted:.4}");

    if let Some(out) = &a.out {
        fs::create_dir_all(out)
            .with_context(|| format!("creating {}", out.display()))
            .map_err(runtime_err)?;
        let mut csv = format!("{CSV_HEADER}\n");
        for r in &reports {
            csv.push_str(&r.csv_rows());
        }
        csv.push_str(&format!("all,weighted_qyi,0,{weighted:.4}\n"));
        write(&out.join("report.csv"), &csv)?;
        let json = serde_json::json!({
            "capped": capped,
            "weighted_qyi": cobench_core::metrics::round4(weighted),
            "problems": reports.iter().map(|r| serde_json::from_str::<serde_json::Value>(&r.to_json()).unwrap()).collect::<Vec<_>>(),
        });
        write(&out.join("report.json"), &(serde_json::to_string_pretty(&json).unwrap() + "\n"))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_list(a: ListArgs, file: &FileConfig) -> Outcome {
    let suite_dir: PathBuf = file.or(a.suite, "suite").map_err(config_err)?.unwrap_or_else(bundled_root);
    println!("{:<22} {:<8} {:>8} {:>5} {:>5}", "problem", "sense", "timeout", "demo", "eval");
    for p in ProblemId::ALL {
        let (d, e) = match Suite::load(&suite_dir, p) {
            Ok(s) => (s.demo.len().to_string(), s.eval.len().to_string()),
            Err(_) => ("-".into(), "-".into()),
        };
        let sense = format!("{:?}", p.sense()).to_lowercase();
        println!("{:<22} {:<8} {:>7}s {:>5} {:>5}", p.as_str(), sense, p.default_timeout_s(), d, e);
    }
    Ok(ExitCode::SUCCESS)
}
