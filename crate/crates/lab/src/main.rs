use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use carleson_lab::config::OperatorSpec;
use carleson_lab::harness;
use carleson_lab::{svg, ExperimentConfig, ExperimentReport, LabError};

#[derive(Parser)]
#[command(name = "carleson-lab", version, about = "Numerical experiments for variational Carleson estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment configuration; defaults apply to omitted fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; without it the report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exit with status 3 when a monitor breaches its threshold.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Norm ratio of the variational partial-sum operator.
    Variation,
    /// Norm ratio of the Carleson maximal operator.
    Carleson,
    /// A_p constants and doubling exponents of the configured weights.
    Apconst,
    /// Size and density decompositions of a generated instance.
    Decompose {
        /// Re-verify a stored decomposition against the configuration.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Tree-estimate ratios over random trees.
    TreeEstimate,
    /// Weighted Lepingle ratios of Littlewood-Paley families.
    Lepingle,
    /// Growth slopes over an exponent grid and a size grid.
    SweepR,
    /// Certified decomposition pipeline with all monitors.
    Report,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

fn load_config(cli: &Cli) -> carleson_lab::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| match e {
            LabError::Io { .. } => LabError::Config(e.to_string()),
            e => e,
        })?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn write_file(path: &Path, text: &str) -> carleson_lab::Result<()> {
    fs::write(path, text).map_err(|e| LabError::io(path, e))
}

fn emit(report: &ExperimentReport, format: Format, out: Option<&Path>) -> carleson_lab::Result<()> {
    let stem = report.provenance.command.split_whitespace().next().unwrap_or("report").to_string();
    match (format, out) {
        (Format::Json, Some(dir)) => write_file(&dir.join(format!("{stem}.json")), &report.to_json()?),
        (Format::Json, None) => {
            println!("{}", report.to_json()?);
            Ok(())
        }
        (Format::Csv, Some(dir)) => {
            for t in &report.tables {
                t.write_csv(&dir.join(format!("{}.csv", t.name)))?;
            }
            Ok(())
        }
        (Format::Csv, None) => {
            for t in &report.tables {
                println!("# {}", t.name);
                let mut w = csv::Writer::from_writer(std::io::stdout());
                w.write_record(&t.columns)?;
                for row in &t.rows {
                    w.write_record(row)?;
                }
                w.flush().map_err(|e| LabError::io("<stdout>", e))?;
            }
            Ok(())
        }
        (Format::Svg, out) => {
            let text = svg::report_svg(report)
                .ok_or_else(|| LabError::Config(format!("`{stem}` has no size axis to plot; use csv or json")))?;
            match out {
                Some(dir) => write_file(&dir.join(format!("{stem}.svg")), &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn run(cli: &Cli) -> carleson_lab::Result<ExperimentReport> {
    let cfg = load_config(cli)?;
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    match &cli.command {
        Command::Variation => {
            let mut cfg = cfg;
            if !matches!(cfg.operator, OperatorSpec::VariationalPartialSums | OperatorSpec::VariationalTruncation) {
                cfg.operator = OperatorSpec::VariationalPartialSums;
            }
            harness::norm_ratio_report(&cfg, "variation")
        }
        Command::Carleson => {
            let cfg = ExperimentConfig { operator: OperatorSpec::CarlesonMaximal, ..cfg };
            harness::norm_ratio_report(&cfg, "carleson")
        }
        Command::Apconst => harness::apconst_report(&cfg),
        Command::Decompose { replay: Some(path) } => {
            let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
            harness::replay(&cfg, &text)
        }
        Command::Decompose { replay: None } => {
            let out = harness::decompose(&cfg)?;
            if let Some(dir) = &cli.out {
                for (name, text) in [("size", &out.size_json), ("density", &out.density_json)] {
                    if let Some(text) = text {
                        write_file(&dir.join(format!("{name}-decomposition.json")), text)?;
                    }
                }
            }
            Ok(out.report)
        }
        Command::TreeEstimate => harness::tree_estimate_report(&cfg),
        Command::Lepingle => harness::lepingle_report(&cfg),
        Command::SweepR => harness::sweep_r(&cfg),
        Command::Report => harness::run_decomposition_report(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| emit(&report, cli.format, cli.out.as_deref()).map(|()| report));
    match result {
        Ok(report) => {
            let breaches = report.breaches();
            for m in &breaches {
                eprintln!("monitor {} = {} exceeds {:?}", m.name, m.value, m.limit);
            }
            let _ = std::io::stdout().flush();
            if cli.strict && !breaches.is_empty() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                LabError::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
