mod args;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use ase_core::data::Dataset;
use ase_core::datasets::{
    generate_synth, load_csv, parse_predicate, summarize, write_csv, write_csv_file, ColumnRef, CsvSchema, PositiveRule,
};
use ase_core::harness::{run_ablation, run_benchmark, run_curve, HarnessConfig, ModelKind};
use ase_core::{AseError, Variant};
use clap::Parser;

use args::{Cli, Command, DataArgs, SeriesFormat, SummaryFormat};

/// Usage errors exit with 2; everything else that fails exits with 1.
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<AseError> for Failure {
    fn from(e: AseError) -> Self {
        Failure::Runtime(e.into())
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("ASE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| usage(format!("ASE_THREADS must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.into()))?;
    }
    Ok(())
}

fn validated(cfg: HarnessConfig) -> Result<HarnessConfig, Failure> {
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Benchmark {
            data,
            model,
            members,
            repeats,
            models,
            out,
        } => {
            let cfg = validated(model.harness(members, repeats))?;
            let kinds: Vec<ModelKind> = dedup(models.into_iter().map(Into::into));
            let (ds, source) = load(&data)?;
            let report = run_benchmark(&ds, &source, &cfg, &kinds)?;
            emit(&out.output, &report.to_json()?)
        }
        Command::Ablate {
            data,
            model,
            members,
            repeats,
            variant,
            out,
        } => {
            let cfg = validated(model.harness(members, repeats))?;
            let variants: Vec<Variant> = if variant.is_empty() {
                Variant::ALL.to_vec()
            } else {
                dedup(variant.into_iter().map(Into::into))
            };
            let (ds, source) = load(&data)?;
            let report = run_ablation(&ds, &source, &cfg, &variants)?;
            emit(&out.output, &report.to_json()?)
        }
        Command::Curve {
            data,
            model,
            max_members,
            format,
            out,
        } => {
            let cfg = validated(model.harness(max_members, 1))?;
            let (ds, source) = load(&data)?;
            let curve = run_curve(&ds, &source, &cfg)?;
            let text = match format {
                SeriesFormat::Csv => curve.to_csv(),
                SeriesFormat::Json => serde_json::to_string_pretty(&curve).map_err(anyhow::Error::from)?,
            };
            emit(&out.output, &text)
        }
        Command::GenSynth {
            negatives,
            positives,
            dim,
            separation,
            seed,
            output,
        } => {
            let spec = ase_core::datasets::SynthSpec {
                negatives,
                positives,
                dim,
                separation,
                seed,
            };
            let ds = generate_synth(&spec).map_err(usage)?;
            if output == "-" {
                let stdout = std::io::stdout();
                write_csv(&ds, stdout.lock()).context("writing to standard output")?;
            } else {
                write_csv_file(&ds, &output)?;
            }
            Ok(())
        }
        Command::Summarize { data, format } => {
            let (ds, _) = load(&data)?;
            let summary = summarize(&ds);
            let text = match format {
                SummaryFormat::Text => summary.to_string(),
                SummaryFormat::Json => serde_json::to_string_pretty(&summary).map_err(anyhow::Error::from)?,
            };
            emit("-", &text)
        }
    }
}

fn dedup<T: PartialEq>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

fn load(args: &DataArgs) -> Result<(Dataset, String), Failure> {
    if let Some(spec) = args.synth_spec() {
        let ds = generate_synth(&spec).map_err(usage)?;
        let source = format!(
            "synth:{}:{}:{}:{}:seed={}",
            spec.negatives, spec.positives, spec.dim, spec.separation, spec.seed
        );
        return Ok((ds, source));
    }
    let path = args
        .data
        .as_ref()
        .ok_or_else(|| usage("one of --data or --synth is required"))?;
    if !args.delimiter.is_ascii() {
        return Err(usage(format!(
            "delimiter must be a single ASCII character, got {:?}",
            args.delimiter
        )));
    }
    let (label_column, positive) = match &args.positive_if {
        Some(expr) => parse_predicate(expr).map_err(usage)?,
        None => (
            ColumnRef::parse(&args.label_column),
            PositiveRule::Equals(args.positive_label.clone()),
        ),
    };
    let schema = CsvSchema {
        label_column,
        positive,
        has_header: !args.no_header,
        delimiter: args.delimiter as u8,
    };
    let ds = load_csv(path, &schema)?;
    let mut source = path.display().to_string();
    if let Some(expr) = &args.positive_if {
        source.push_str(&format!(" [{expr}]"));
    }
    Ok((ds, source))
}

fn emit(output: &str, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    if output == "-" {
        std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .context("writing to standard output")?;
    } else {
        fs::write(output, text)
            .with_context(|| format!("writing {output}"))
            .map_err(|e| Failure::Runtime(anyhow!(e)))?;
    }
    Ok(())
}
