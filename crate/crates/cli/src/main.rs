use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use probqsar::dataio::{
    features, load_chembl_csv, write_atomic, Dataset, RunConfig, TrainedPipeline,
};
use probqsar::eval::{
    curves_to_csv, run_ablation, run_benchmark, run_synthetic_check, BenchmarkOutcome,
    CorruptedSynthetic, SyntheticTask,
};
use probqsar::featurize::Featurizer;

/// Activity regression with a probabilistic conditional GAN.
#[derive(Debug, Parser)]
#[command(name = "probqsar", version)]
struct Cli {
    /// Seed for every stochastic step (overrides the config; benchmark and
    /// ablate then run this single seed).
    #[arg(long, global = true, env = "PROBQSAR_SEED")]
    seed: Option<u64>,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (featurize, train, predict, synth-check) or directory (benchmark, ablate).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the fused descriptor of every molecule in an activity export.
    Featurize {
        /// Activity CSV/TSV (defaults to `data.path` from the config).
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Train the full pipeline on an activity export and save a bundle.
    Train {
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Predictive mean and std for SMILES strings using a saved bundle.
    Predict {
        #[arg(long)]
        bundle: PathBuf,
        /// File with one SMILES per line.
        #[arg(long)]
        smiles_file: Option<PathBuf>,
        smiles: Vec<String>,
    },
    /// Held-out comparison of the configured models.
    Benchmark {
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Four-way ablation; uses the corrupted synthetic task when no data is given.
    Ablate {
        #[arg(long)]
        data: Option<PathBuf>,
        /// Synthetic sample count (defaults to `synthetic_samples`).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Score Prob-cGAN against the known noise of the synthetic task.
    SynthCheck {
        #[arg(long)]
        n: Option<usize>,
    },
}

/// Failure after the arguments were accepted.
struct DataFailure(anyhow::Error);

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(DataFailure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), DataFailure> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("--config {}", p.display())),
        None => Ok(RunConfig::default()),
    }
    .map_err(DataFailure)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
        config.seeds = vec![seed];
    }
    log::info!("run config fingerprint {:016x}", config.fingerprint());
    let out = cli.out.as_deref();
    match cli.command {
        Command::Featurize { data } => featurize(&config, data, out),
        Command::Train { data } => train(&config, data, out),
        Command::Predict {
            bundle,
            smiles_file,
            smiles,
        } => predict(&bundle, smiles_file.as_deref(), smiles, out),
        Command::Benchmark { data } => benchmark(&config, data, out),
        Command::Ablate { data, n } => ablate(&config, data, n, out),
        Command::SynthCheck { n } => synth_check(&config, n, out),
    }
    .map_err(DataFailure)
}

fn dataset(config: &RunConfig, data: Option<PathBuf>) -> Result<Dataset> {
    let Some(path) = data.or_else(|| config.data.path.clone()) else {
        bail!("no dataset: pass --data or set data.path in the config");
    };
    let d = load_chembl_csv(&path, &config.data.columns).with_context(|| format!("--data {}", path.display()))?;
    let p = &d.provenance;
    eprintln!(
        "{}: {} rows -> {} compounds ({} duplicate rows merged; skipped {})",
        path.display(),
        p.input_rows,
        d.len(),
        p.duplicates_merged,
        format_skips(&d)
    );
    Ok(d)
}

fn format_skips(d: &Dataset) -> String {
    let parts: Vec<String> = d
        .provenance
        .skipped
        .nonzero()
        .into_iter()
        .map(|(k, v)| format!("{k}: {v}"))
        .collect();
    if parts.is_empty() {
        "none".into()
    } else {
        parts.join(", ")
    }
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, text.as_bytes()).with_context(|| format!("--out {}", path.display()))
}

fn featurize(config: &RunConfig, data: Option<PathBuf>, out: Option<&Path>) -> Result<()> {
    let d = dataset(config, data)?;
    let p = config.pipeline().seeded(config.seed);
    let m = d.molecules();
    let f = Featurizer::fit(&m.smiles, p.fingerprint, &p.skipgram)?;
    let x = features(&f, &m.smiles)?;
    let mut text = String::from("id,pchembl");
    for j in 0..x.ncols() {
        let _ = write!(text, ",f{j}");
    }
    text.push('\n');
    for (rec, row) in d.records.iter().zip(x.rows()) {
        let _ = write!(text, "{},{}", rec.id, rec.pchembl);
        for v in row {
            let _ = write!(text, ",{v}");
        }
        text.push('\n');
    }
    let path = out.unwrap_or(Path::new("features.csv"));
    write_out(path, &text)?;
    eprintln!("wrote {} x {} features to {}", x.nrows(), x.ncols(), path.display());
    Ok(())
}

fn train(config: &RunConfig, data: Option<PathBuf>, out: Option<&Path>) -> Result<()> {
    let d = dataset(config, data)?;
    let pipeline = TrainedPipeline::train(&d.molecules(), config)?;
    let path = out.unwrap_or(Path::new("model.pqsr"));
    pipeline.save(path).with_context(|| format!("--out {}", path.display()))?;
    eprintln!("saved {} bundle to {}", config.train_model, path.display());
    Ok(())
}

fn predict(bundle: &Path, file: Option<&Path>, mut smiles: Vec<String>, out: Option<&Path>) -> Result<()> {
    let pipeline = TrainedPipeline::load(bundle).with_context(|| format!("--bundle {}", bundle.display()))?;
    if let Some(f) = file {
        let text = std::fs::read_to_string(f).with_context(|| format!("--smiles-file {}", f.display()))?;
        smiles.extend(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from));
    }
    if smiles.is_empty() {
        bail!("no SMILES given");
    }
    let dists = pipeline.predict(&smiles)?;
    let mut text = String::from("smiles,mean,std\n");
    for (s, d) in smiles.iter().zip(&dists) {
        let _ = writeln!(text, "{s},{:.6},{:.6}", d.mean(), d.std());
    }
    match out {
        Some(p) => write_out(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(outcome: &BenchmarkOutcome, out: Option<&Path>) -> Result<()> {
    let text = outcome.report.to_text();
    print!("{text}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("--out {}", dir.display()))?;
        write_out(&dir.join("report.csv"), &outcome.report.to_csv())?;
        write_out(&dir.join("report.txt"), &text)?;
        write_out(&dir.join("curves.csv"), &curves_to_csv(&outcome.curves))?;
    }
    Ok(())
}

fn benchmark(config: &RunConfig, data: Option<PathBuf>, out: Option<&Path>) -> Result<()> {
    let d = dataset(config, data)?;
    let models = config.benchmark_models()?;
    let outcome = run_benchmark("Benchmark", &d.molecules(), &models, &config.pipeline(), &config.seeds)?;
    emit(&outcome, out)
}

fn ablate(config: &RunConfig, data: Option<PathBuf>, n: Option<usize>, out: Option<&Path>) -> Result<()> {
    let outcome = match data.or_else(|| config.data.path.clone()) {
        Some(path) => run_ablation(&dataset(config, Some(path))?.molecules(), &config.pipeline(), &config.seeds)?,
        None => {
            let n = n.unwrap_or(config.synthetic_samples);
            let task = SyntheticTask::generate(n, config.seed)
                .with_context(|| format!("--n {n}: the synthetic task needs at least 500 samples"))?;
            run_ablation(&CorruptedSynthetic::new(task, config.seed), &config.pipeline(), &config.seeds)?
        }
    };
    emit(&outcome, out)
}

fn synth_check(config: &RunConfig, n: Option<usize>, out: Option<&Path>) -> Result<()> {
    let n = n.unwrap_or(config.synthetic_samples);
    let check = run_synthetic_check(n, config.seed, &config.gan).with_context(|| format!("--n {n}"))?;
    let text = check.to_text();
    print!("{text}");
    if let Some(p) = out {
        write_out(p, &text)?;
    }
    Ok(())
}
