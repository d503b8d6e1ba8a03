use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use submat_eig::estimators::SamplerKind;
use submat_eig::harness::{
    self, aggregate_series, slope_fit, ExperimentConfig, MatrixSpec, ZERO_BASELINE,
};
use submat_eig::rng::{derive_seed, label_tag};
use submat_eig::{Error, Execution};

#[derive(Parser)]
#[command(name = "submat-eig", version, about = "Eigenvalue estimation from sampled principal submatrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV (stdout when no output is set).
    Run(Box<RunArgs>),
    /// Print the exact spectrum of a matrix spec, largest first, to 13
    /// significant digits.
    Spectrum {
        /// `name:key=value,...` or `file:path`
        spec: String,
    },
    /// Fit log-log slopes of mean scaled error against sample fraction.
    Slope {
        csv: PathBuf,
        #[arg(long)]
        sampler: Option<String>,
        /// 1-based rank as stored in the CSV `target_index` column
        #[arg(long)]
        target: Option<usize>,
    },
    /// Time each sampler on one matrix.
    Bench(BenchArgs),
}

/// Every config key is also a flag; flags override the config file.
#[derive(Args)]
struct RunArgs {
    config: Option<PathBuf>,
    #[arg(long)]
    id: Option<String>,
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long)]
    samplers: Option<String>,
    #[arg(long)]
    fractions: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    targets: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    c2: Option<String>,
    #[arg(long = "c2_theorem", alias = "c2-theorem")]
    c2_theorem: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long = "entrywise_p", alias = "entrywise-p")]
    entrywise_p: Option<String>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long = "record_timing", alias = "record-timing")]
    record_timing: Option<String>,
    /// Run trials on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "er:n=1000,p=0.05,seed=1")]
    matrix: String,
    #[arg(long, default_value_t = 0.1)]
    fraction: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Comma-separated sampler names; all samplers by default.
    #[arg(long)]
    samplers: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    sequential: bool,
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn run(args: RunArgs) -> submat_eig::Result<()> {
    let mut pairs = match &args.config {
        Some(path) => ExperimentConfig::parse_pairs(&std::fs::read_to_string(path)?)?,
        None => Vec::new(),
    };
    let flags = [
        ("id", args.id),
        ("matrix", args.matrix),
        ("samplers", args.samplers),
        ("fractions", args.fractions),
        ("trials", args.trials),
        ("targets", args.targets),
        ("seed", args.seed),
        ("c2", args.c2),
        ("c2_theorem", args.c2_theorem),
        ("eps", args.eps),
        ("entrywise_p", args.entrywise_p),
        ("output", args.output),
        ("record_timing", args.record_timing),
    ];
    debug_assert_eq!(flags.len(), harness::CONFIG_KEYS.len());
    pairs.extend(flags.into_iter().filter_map(|(k, v)| Some((k.to_string(), v?))));
    let cfg = ExperimentConfig::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;

    let rows = harness::run_experiment(&cfg, execution(args.sequential))?;
    if cfg.output.is_none() {
        harness::write_results_to(std::io::stdout().lock(), &rows)?;
    }
    let failed = rows.iter().filter(|r| r.is_failed()).count();
    if failed > 0 {
        eprintln!("warning: {failed} rows come from failed trials (NaN estimates)");
    }
    if let Some(path) = &cfg.output {
        eprintln!("wrote {} rows to {}", rows.len(), path.display());
    }
    Ok(())
}

/// Rounds to 13 significant digits so solver noise in the last bits does
/// not show up in printed spectra.
fn round_sig(v: f64) -> f64 {
    format!("{v:.12e}").parse().unwrap_or(v)
}

fn spectrum(spec: &str) -> submat_eig::Result<()> {
    let spec = MatrixSpec::parse(spec)?;
    let m = spec.materialize()?;
    let eigs = harness::exact_spectrum_cached(&spec, &m)?;
    let scale = eigs.values().iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let text: Vec<String> = eigs
        .values()
        .iter()
        .map(|&v| if v.abs() < 1e-12 * scale { 0.0 } else { v })
        .map(|v| round_sig(v).to_string())
        .collect();
    println!("{}", text.join(" "));
    Ok(())
}

fn slope(csv: &Path, sampler: Option<&str>, target: Option<usize>) -> submat_eig::Result<()> {
    let rows = harness::read_results(csv)?;
    if rows.is_empty() {
        return Err(Error::Format(format!("{}: no data rows", csv.display())));
    }
    if let (Some(s), Some(t)) = (sampler, target) {
        println!("{}", slope_fit(&rows, s, t)?);
        return Ok(());
    }
    let mut cells: Vec<(String, usize)> = Vec::new();
    for p in aggregate_series(&rows) {
        let key = (p.sampler, p.target_index);
        let wanted = sampler.is_none_or(|s| s == key.0) && target.is_none_or(|t| t == key.1);
        if wanted && key.0 != ZERO_BASELINE && !cells.contains(&key) {
            cells.push(key);
        }
    }
    let mut out = std::io::stdout().lock();
    for (s, t) in cells {
        match slope_fit(&rows, &s, t) {
            Ok(v) => writeln!(out, "{s}\t{t}\t{v}")?,
            Err(e) => writeln!(out, "{s}\t{t}\tNaN\t# {e}")?,
        }
    }
    Ok(())
}

fn bench(args: BenchArgs) -> submat_eig::Result<()> {
    let mut cfg = ExperimentConfig::new(MatrixSpec::parse(&args.matrix)?);
    cfg.fractions = vec![args.fraction];
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    match &args.samplers {
        Some(list) => cfg.set("samplers", list)?,
        None => cfg.samplers = SamplerKind::ALL.to_vec(),
    }
    cfg.validate()?;
    let m = cfg.matrix.materialize()?;
    let s = args.fraction * m.n() as f64;
    let exec = execution(args.sequential);
    let mut out = std::io::stdout().lock();
    writeln!(out, "sampler\ttrials\ttotal_ms\tper_trial_ms\tfailed")?;
    for &kind in &cfg.samplers {
        let started = Instant::now();
        let results = exec.map(args.trials, |t| {
            let seed = derive_seed(cfg.seed, &[label_tag(kind.name()), t as u64]);
            harness::run_sampler(kind, &m, s, &cfg, seed)
        });
        let ms = started.elapsed().as_secs_f64() * 1e3;
        let failed = results.iter().filter(|r| r.is_err()).count();
        writeln!(
            out,
            "{}\t{}\t{:.3}\t{:.3}\t{}",
            kind.name(),
            args.trials,
            ms,
            ms / args.trials as f64,
            failed
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(*args),
        Command::Spectrum { spec } => spectrum(&spec),
        Command::Slope {
            csv,
            sampler,
            target,
        } => slope(&csv, sampler.as_deref(), target),
        Command::Bench(args) => bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
