use std::path::PathBuf;
use std::process::ExitCode;

use assouad_core::instances::{save_instance, InstanceKind};
use assouad_core::io::{read_json, write_report, EmbeddingFile};
use assouad_core::verify::{compare_coordinates, sort_violations};
use assouad_core::{
    generate_instance, load_instance, run_pipeline, verify_all, Error, InstanceSource, ReferenceEvaluator,
    RunConfig,
};
use clap::{Args, Parser, Subcommand};

/// Build and certify snowflake embeddings of finite metric spaces.
#[derive(Parser)]
#[command(name = "assouad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an embedding, optionally verifying it.
    Embed(EmbedArgs),
    /// Re-verify a stored embedding against its instance.
    Verify(VerifyArgs),
    /// Write a synthetic instance file.
    Generate(GenerateArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    #[arg(long)]
    instance: Option<PathBuf>,
    /// grid:W,H | line:N | cantor:L | random:N[,SEED]
    #[arg(long)]
    generate: Option<String>,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = assouad_core::pipeline::DEFAULT_ALPHA)]
    alpha: f64,
    /// Largest passing value of 0.1, 0.05, 0.02, ... when omitted.
    #[arg(long)]
    tau: Option<f64>,
    /// Estimated from the instance when omitted.
    #[arg(long)]
    c0: Option<u64>,
    /// floor(8 log2 c0) + 1 when omitted.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-level nets and colors.
    #[arg(long)]
    levels: Option<PathBuf>,
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    kind: String,
    #[arg(long)]
    out: PathBuf,
}

fn parse_kind(text: &str) -> Result<InstanceKind, Error> {
    let kind: InstanceKind = text.parse()?;
    match std::env::var("ASSOUAD_SEED") {
        Ok(seed) => {
            let seed = seed.trim().parse().map_err(|_| Error::BadGenerator(format!("ASSOUAD_SEED={seed}")))?;
            Ok(kind.with_seed(seed))
        }
        Err(_) => Ok(kind),
    }
}

fn embed(args: EmbedArgs) -> Result<i32, Error> {
    let source = match (args.source.instance, args.source.generate) {
        (Some(path), _) => InstanceSource::File(path),
        (None, Some(kind)) => InstanceSource::Generate(parse_kind(&kind)?),
        (None, None) => unreachable!("clap requires a source"),
    };
    let mut config = RunConfig::new(source);
    config.alpha = args.alpha;
    config.tau = args.tau;
    config.c0_override = args.c0;
    config.m_override = args.m;
    config.out = Some(args.out);
    config.report = args.report;
    config.levels_out = args.levels;
    config.verify = !args.no_verify;

    let outcome = run_pipeline(&config)?;
    let p = outcome.map.params();
    eprintln!(
        "n={} c0={} alpha={} tau={} m={} chi={} N={}",
        outcome.space.len(),
        outcome.c0,
        p.alpha,
        p.tau,
        p.m,
        p.chi,
        outcome.map.dimension()
    );
    if let Some(report) = &outcome.report {
        summarize(report);
    }
    Ok(outcome.exit_code())
}

fn verify(args: VerifyArgs) -> Result<i32, Error> {
    let space = load_instance(&args.instance)?;
    let file: EmbeddingFile = read_json(&args.embedding)?;
    let map = file.to_map(&space)?;
    let mut report = verify_all(&space, &map, file.c0)?;
    let reference = ReferenceEvaluator::new(&space, &map)?;
    report
        .violations
        .extend(compare_coordinates(&reference.coordinates(), &file.coordinates_for(&space)?));
    sort_violations(&mut report.violations);
    write_report(&args.report, &report)?;
    summarize(&report);
    Ok(if report.pass() { 0 } else { 5 })
}

fn generate(args: GenerateArgs) -> Result<i32, Error> {
    let space = generate_instance(parse_kind(&args.kind)?)?;
    save_instance(&space, &args.out)?;
    Ok(0)
}

fn summarize(report: &assouad_core::DistortionReport) {
    let ratio = |r: Option<f64>| r.map_or("-".to_string(), |v| format!("{v:.6e}"));
    eprintln!(
        "ratio lower {} (bound {:.6e}) upper {} (bound {:.6e}): {} violations, {}",
        ratio(report.lower_ratio),
        report.lower_bound,
        ratio(report.upper_ratio),
        report.upper_bound,
        report.violations.len(),
        if report.pass() { "pass" } else { "FAIL" }
    );
}

fn main() -> ExitCode {
    // usage errors exit 1 so that 2 stays reserved for parameter rejection
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Embed(args) => embed(args),
        Command::Verify(args) => verify(args),
        Command::Generate(args) => generate(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
