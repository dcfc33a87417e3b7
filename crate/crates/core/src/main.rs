use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use convoy_sim::plot::render_plots;
use convoy_sim::{
    parse_scenario, read_trace, run_simulation, summarize, write_trace, SimConfig, SimError,
    TraceFormat,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_SIM_ABORT: u8 = 3;

#[derive(Parser)]
#[command(name = "convoy-sim", version, about = "Convoy surveillance simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

impl From<Format> for TraceFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => TraceFormat::Csv,
            Format::Jsonl => TraceFormat::JsonLines,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario, write its trace, and print the summary JSON
    Run {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        plots: bool,
    },
    /// Parse and validate a scenario without running it
    Validate { scenario: PathBuf },
    /// Print the summary JSON for an existing trace file
    Summarize { trace: PathBuf },
    /// Run every *.toml scenario in a directory (in parallel)
    Batch {
        dir: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        plots: bool,
    },
}

fn default_snapshot_times(cfg: &SimConfig) -> Vec<f64> {
    (0..=4).map(|i| cfg.duration * i as f64 / 4.0).collect()
}

fn run_one(
    scenario: &Path,
    out: &Path,
    format: TraceFormat,
    plots: bool,
    quiet: bool,
) -> Result<(), u8> {
    let cfg = parse_scenario(scenario).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_VALIDATION
    })?;
    let trace = run_simulation(&cfg).map_err(|e| {
        eprintln!("error: {e}");
        match e {
            SimError::NonFinite { .. } => EXIT_SIM_ABORT,
            _ => EXIT_VALIDATION,
        }
    })?;
    std::fs::create_dir_all(out).map_err(|e| {
        eprintln!("error: cannot create {}: {e}", out.display());
        1
    })?;
    let trace_path = out.join(format!("{}.{}", cfg.name, format.extension()));
    write_trace(&trace, &trace_path, format).map_err(|e| {
        eprintln!("error: {e}");
        1
    })?;
    eprintln!("wrote {}", trace_path.display());
    if plots {
        let files = render_plots(&trace, out, &default_snapshot_times(&cfg)).map_err(|e| {
            eprintln!("error: plot emission failed: {e}");
            1u8
        })?;
        for f in files {
            eprintln!("wrote {}", f.display());
        }
    }
    let summary = summarize(&trace);
    if !quiet {
        println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            scenario,
            out,
            format,
            plots,
        } => run_one(&scenario, &out, format.into(), plots, false).err(),
        Command::Validate { scenario } => match parse_scenario(&scenario) {
            Ok(cfg) => {
                eprintln!("ok: {} ({} s at dt={} s)", cfg.name, cfg.duration, cfg.dt);
                None
            }
            Err(e) => {
                eprintln!("error: {e}");
                Some(EXIT_VALIDATION)
            }
        },
        Command::Summarize { trace } => match read_trace(&trace) {
            Ok(tr) => {
                println!("{}", serde_json::to_string(&summarize(&tr)).expect("summary serializes"));
                None
            }
            Err(e) => {
                eprintln!("error: {e}");
                Some(EXIT_VALIDATION)
            }
        },
        Command::Batch {
            dir,
            out,
            format,
            plots,
        } => batch(&dir, &out, format.into(), plots).err(),
    };
    match code {
        None => ExitCode::SUCCESS,
        Some(c) => ExitCode::from(c),
    }
}

fn batch(dir: &Path, out: &Path, format: TraceFormat, plots: bool) -> Result<(), u8> {
    let mut scenarios: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| {
            eprintln!("error: cannot read {}: {e}", dir.display());
            1u8
        })?
        .filter_map(|entry| {
            let path = entry.ok()?.path();
            (path.extension()?.to_str()? == "toml").then_some(path)
        })
        .collect();
    scenarios.sort();
    if scenarios.is_empty() {
        eprintln!("error: no *.toml scenarios in {}", dir.display());
        return Err(EXIT_VALIDATION);
    }
    // each scenario gets its own output subdirectory, so parallel runs
    // never share I/O paths
    let mut worst: Option<u8> = None;
    std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|path| {
                let stem = path.file_stem().unwrap().to_string_lossy().to_string();
                let sub = out.join(stem);
                scope.spawn(move || run_one(path, &sub, format, plots, false).err())
            })
            .collect();
        for h in handles {
            if let Some(code) = h.join().unwrap_or(Some(1)) {
                worst = Some(worst.map_or(code, |w| w.max(code)));
            }
        }
    });
    match worst {
        None => Ok(()),
        Some(c) => Err(c),
    }
}
