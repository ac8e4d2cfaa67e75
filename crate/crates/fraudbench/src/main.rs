use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use fraudbench::csvio::{read_header, schema_from_header};
use fraudbench::plots::emit_plots;
use fraudbench::{
    load_csv, load_model, run_benchmark, save_model, write_csv, write_outputs, BenchmarkConfig, BenchmarkReport,
    DatasetSource, RunOptions, SavedModel, Schema, SyntheticSpec,
};
use fraudbench_core::data::{synth_generate, LABEL_COLUMN};
use fraudbench_core::eval::{auroc, fit_pipeline};
use fraudbench_core::{CvOptions, ModelKind, ModelSpec, ParamValue};

#[derive(Parser)]
#[command(name = "fraudbench", version, about = "Credit-card fraud model benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-validate the configured models and write report, results CSV and plots.
    Bench(BenchArgs),
    /// Fit one model on a whole dataset and save the pipeline.
    Fit(FitArgs),
    /// Score a CSV with a saved pipeline.
    Score(ScoreArgs),
    /// Generate a synthetic transaction table.
    Synth(SynthArgs),
    /// Re-draw the charts from a report JSON.
    Plots(PlotsArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Labelled CSV; feature columns are taken from the header, which must end in `Class`.
    #[arg(long, conflicts_with = "synthetic")]
    dataset: Option<PathBuf>,
    /// Synthetic data as N_NORMAL,N_FRAUD,SEPARATION,DIMS.
    #[arg(long, value_parser = parse_synthetic)]
    synthetic: Option<SyntheticSpec>,
}

impl DataArgs {
    fn source(&self) -> Option<DatasetSource> {
        match (&self.dataset, &self.synthetic) {
            (Some(path), _) => {
                let columns = read_header(path)
                    .ok()
                    .map(schema_from_header)
                    .filter(|s| s.label.is_some() && s != &Schema::kaggle())
                    .map(|s| s.features);
                Some(DatasetSource::Csv {
                    path: path.clone(),
                    columns,
                })
            }
            (None, Some(s)) => Some(DatasetSource::Synthetic(s.clone())),
            (None, None) => None,
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// TOML config; without one, all ten models run with shipped defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    data: DataArgs,
    /// Leave `seconds` null so the report is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    model: ModelKind,
    /// Hyperparameter override KEY=VALUE; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, ParamValue)>,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to save the fitted pipeline.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Saved pipeline from `fit`.
    #[arg(long)]
    model: PathBuf,
    /// CSV with the model's feature columns and optionally `Class`.
    #[arg(long)]
    data: PathBuf,
    /// Output CSV (`row,score[,label]`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    n_normal: usize,
    #[arg(long)]
    n_fraud: usize,
    #[arg(long)]
    separation: f64,
    #[arg(long, default_value_t = 30)]
    dims: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PlotsArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_synthetic(s: &str) -> Result<SyntheticSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [n_normal, n_fraud, separation, dims] = parts[..] else {
        return Err("expected N_NORMAL,N_FRAUD,SEPARATION,DIMS".into());
    };
    let int = |v: &str| v.parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok(SyntheticSpec {
        n_normal: int(n_normal)?,
        n_fraud: int(n_fraud)?,
        separation: separation.parse().map_err(|e| format!("`{separation}`: {e}"))?,
        dims: int(dims)?,
        seed: None,
    })
}

fn parse_param(s: &str) -> Result<(String, ParamValue), String> {
    let (key, value) = s.split_once('=').ok_or("expected KEY=VALUE")?;
    let value = value.trim();
    let parsed = if let Ok(b) = value.parse::<bool>() {
        ParamValue::Bool(b)
    } else if let Ok(i) = value.parse::<i64>() {
        ParamValue::Int(i)
    } else if let Ok(f) = value.parse::<f64>() {
        ParamValue::Float(f)
    } else {
        ParamValue::Text(value.into())
    };
    Ok((key.trim().into(), parsed))
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    let mut config = match &args.config {
        Some(path) => BenchmarkConfig::load(path)?,
        None => {
            let source = args
                .data
                .source()
                .ok_or_else(|| anyhow!("give --config, --dataset or --synthetic"))?;
            BenchmarkConfig::all_models(source, args.seed.unwrap_or(0))
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(source) = args.data.source() {
        config.dataset = source;
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.out_dir.clone())
        .ok_or_else(|| anyhow!("no output directory: give --out or set out_dir"))?;
    let opts = RunOptions {
        timing: !args.no_timing,
        threads: args.threads,
    };
    let mut report = run_benchmark(&config, &opts)?;
    write_outputs(&mut report, &out)?;
    for r in &report.results {
        match (&r.error, r.pooled_auroc) {
            (None, Some(a)) => eprintln!(
                "{:<6} {:<12} pooled AUROC {a:.4}  mean {:.4} ± {:.4}",
                r.model,
                r.track,
                r.mean.unwrap_or(f64::NAN),
                r.std.unwrap_or(f64::NAN)
            ),
            (err, _) => eprintln!("{:<6} {:<12} failed: {}", r.model, r.track, err.as_deref().unwrap_or("no result")),
        }
    }
    eprintln!("wrote {}", out.join("report.json").display());
    Ok(())
}

fn fit(args: FitArgs) -> anyhow::Result<()> {
    let source = args
        .data
        .source()
        .ok_or_else(|| anyhow!("give --dataset or --synthetic"))?;
    let data = source.load(args.seed)?;
    let mut spec = ModelSpec::default_for(args.model);
    for (k, v) in &args.params {
        spec.set(k, v).with_context(|| format!("parameter {k}"))?;
    }
    let (pipeline, rows) = fit_pipeline(&spec, &data, &CvOptions::default(), args.seed)?;
    let saved = SavedModel {
        columns: data.column_names().to_vec(),
        pipeline,
    };
    save_model(&args.out, &saved)?;
    eprintln!("fitted {} on {rows} rows; saved {}", args.model, args.out.display());
    Ok(())
}

fn score(args: ScoreArgs) -> anyhow::Result<()> {
    let saved = load_model(&args.model)?;
    let header = read_header(&args.data)?;
    let labelled = header.last().map(String::as_str) == Some(LABEL_COLUMN);
    let schema = if labelled {
        Schema::labelled(saved.columns.clone())
    } else {
        Schema::unlabelled(saved.columns.clone())
    };
    let data = load_csv(&args.data, &schema)?;
    let scores = saved.score(&data)?;
    let mut out = String::from(if labelled { "row,score,label\n" } else { "row,score\n" });
    for (i, s) in scores.iter().enumerate() {
        if labelled {
            out.push_str(&format!("{i},{s},{}\n", data.labels()[i]));
        } else {
            out.push_str(&format!("{i},{s}\n"));
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{out}"),
    }
    if labelled {
        match auroc(&scores, data.labels()) {
            Ok(a) => eprintln!("AUROC {a:.4}"),
            Err(e) => eprintln!("AUROC unavailable: {e}"),
        }
    }
    Ok(())
}

fn synth(args: SynthArgs) -> anyhow::Result<()> {
    let data = synth_generate(args.n_normal, args.n_fraud, args.separation, args.dims, args.seed)?;
    write_csv(&args.out, &data)?;
    eprintln!("wrote {} rows to {}", data.n_rows(), args.out.display());
    Ok(())
}

fn plots(args: PlotsArgs) -> anyhow::Result<()> {
    let report = BenchmarkReport::load(&args.report)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let out = emit_plots(&report, &args.out)?;
    for n in &out.notices {
        eprintln!("{n}");
    }
    for p in &out.paths {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Fit(a) => fit(a),
        Command::Score(a) => score(a),
        Command::Synth(a) => synth(a),
        Command::Plots(a) => plots(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

