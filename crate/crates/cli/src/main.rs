use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qlagrange::harness::{write_outputs, ConfigDocument, Harness};

/// Schrödinger vs Lagrangian equivalence runs.
#[derive(Parser)]
#[command(name = "qlagrange", version, about)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Evolve both formulations and compare them.
    Run(Common),
    /// Sorted spectra of the phase-space and Lagrangian generators.
    Spectrum(Common),
    /// Test whether the real part of the Hamiltonian is invertible (exit 1 if not).
    CheckSingularity(Common),
    /// Measure a Klein–Gordon standing-wave frequency.
    KgDispersion(Common),
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML). Repeat to run several configs in parallel.
    #[arg(long = "config", required = true)]
    configs: Vec<PathBuf>,
    /// Output directory. With several configs each gets a subdirectory named
    /// after its file stem.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Invertibility tolerance; for kg-dispersion, the limit on the relative
    /// omega^2 error.
    #[arg(long)]
    tol: Option<f64>,
}

/// What one config produced: text for stdout and whether its checks passed.
struct Outcome {
    text: String,
    passed: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (verb, common) = match &cli.verb {
        Verb::Run(c) => ("run", c),
        Verb::Spectrum(c) => ("spectrum", c),
        Verb::CheckSingularity(c) => ("check-singularity", c),
        Verb::KgDispersion(c) => ("kg-dispersion", c),
    };
    if let Some(tol) = common.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            eprintln!("error: --tol must be a positive number, got {tol}");
            return ExitCode::from(2);
        }
    }

    let multi = common.configs.len() > 1;
    let results: Vec<(PathBuf, qlagrange::Result<Outcome>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = common
            .configs
            .iter()
            .map(|path| {
                let out = common.out.as_ref().map(|dir| if multi { dir.join(stem(path)) } else { dir.clone() });
                scope.spawn(move || (path.clone(), execute(verb, path, out.as_deref(), common.tol)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    });

    let mut code = 0u8;
    for (path, result) in results {
        if multi {
            println!("== {} ==", path.display());
        }
        match result {
            Ok(outcome) => {
                println!("{}", outcome.text);
                if !outcome.passed {
                    code = code.max(1);
                }
            }
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                code = 2;
            }
        }
    }
    ExitCode::from(code)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "config".to_string())
}

fn execute(verb: &str, path: &Path, out: Option<&Path>, tol: Option<f64>) -> qlagrange::Result<Outcome> {
    let mut doc = ConfigDocument::load(path)?;
    let harness = Harness::new();
    match verb {
        "run" => {
            if tol.is_some() {
                doc.config.invertibility_tol = tol;
            }
            let run = harness.run_equivalence(&doc)?;
            if let Some(dir) = out {
                write_outputs(&run, &doc.config.outputs_or_default(), dir)?;
            }
            let mut passed = true;
            let mut text = run.report.to_json();
            if let Some(thresholds) = &doc.config.thresholds {
                for check in run.report.check(thresholds) {
                    let value = check.value.map_or("missing".to_string(), |v| format!("{v:e}"));
                    let status = if check.passed { "PASS" } else { "FAIL" };
                    text.push_str(&format!("\n{status} {} = {value} (limit {:e})", check.name, check.limit));
                    passed &= check.passed;
                }
            }
            Ok(Outcome { text, passed })
        }
        "spectrum" => {
            if tol.is_some() {
                doc.config.invertibility_tol = tol;
            }
            let report = harness.run_spectrum_report(&doc)?;
            let text = report.to_json();
            if let Some(dir) = out {
                write_file(dir, "spectrum_report.json", &text)?;
            }
            Ok(Outcome { text, passed: true })
        }
        "check-singularity" => {
            if tol.is_some() {
                doc.config.invertibility_tol = tol;
            }
            let report = harness.check_singularity(&doc)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            if let Some(dir) = out {
                write_file(dir, "singularity_report.json", &text)?;
            }
            Ok(Outcome { text, passed: report.invertible })
        }
        _ => {
            if let (Some(tol), Some(kg)) = (tol, doc.config.kg_dispersion.as_mut()) {
                kg.tolerance = Some(tol);
            }
            let report = harness.kg_dispersion(&doc)?;
            let text = report.to_json();
            if let Some(dir) = out {
                write_file(dir, "kg_dispersion.json", &text)?;
            }
            Ok(Outcome { text, passed: report.passed })
        }
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> qlagrange::Result<()> {
    let io = |p: &Path, e| qlagrange::Error::Io { path: p.to_path_buf(), source: e };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io(&path, e))
}
