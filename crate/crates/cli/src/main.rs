//! `fracplap` runs s-sweeps and gamma checks and writes CSV or JSON reports.
//!
//! Exit status: 0 when every check passes, 2 when a check fails, 1 on
//! configuration, solver or I/O errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use fracplap::harness::{emit_report, read_config, run, Mode, SweepConfig, SweepReport};
use fracplap::Error;

#[derive(Parser)]
#[command(name = "fracplap", version, about = "Fractional p-Laplacian sweeps towards the local limit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First eigenvalue along the s-grid and at s = 1.
    Eigen(Options),
    /// Ground-state levels along the s-grid and at s = 1.
    GroundState(Options),
    /// Energies and pairings of a fixed smooth pair along the s-grid.
    GammaCheck(Options),
    /// All three of the above.
    Sweep(Options),
}

/// Flags override values read from `--config`.
#[derive(Args)]
struct Options {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Left endpoint of the interval.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// Right endpoint of the interval.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Number of elements.
    #[arg(long)]
    n: Option<String>,
    /// Exponent p > 1.
    #[arg(long)]
    p: Option<String>,
    /// Nonlinearity exponent q > p (ground states).
    #[arg(long)]
    q: Option<String>,
    /// Comma-separated, strictly increasing values in (0, 1).
    #[arg(long = "s-grid")]
    s_grid: Option<String>,
    /// Relative residual tolerance of the solver.
    #[arg(long)]
    tol: Option<String>,
    /// Output file; standard output when absent. `sweep` inserts the mode
    /// before the extension.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

impl Options {
    fn flags(&self) -> [(&'static str, Option<&String>); 9] {
        [
            ("a", self.a.as_ref()),
            ("b", self.b.as_ref()),
            ("n", self.n.as_ref()),
            ("p", self.p.as_ref()),
            ("q", self.q.as_ref()),
            ("s-grid", self.s_grid.as_ref()),
            ("tol", self.tol.as_ref()),
            ("out", self.out.as_ref()),
            ("format", self.format.as_ref()),
        ]
    }

    fn config(&self) -> Result<SweepConfig, Error> {
        let mut config = SweepConfig::default();
        if let Some(path) = &self.config {
            config.apply_text(&read_config(path)?)?;
        }
        for (key, value) in self.flags() {
            if let Some(value) = value {
                config
                    .set(key, value)
                    .map_err(|e| Error::Config(format!("--{key}: {e}")))?;
            }
        }
        Ok(config)
    }
}

/// `dir/name.ext` becomes `dir/name-<mode>.ext`.
fn mode_path(path: &Path, mode: Mode, extension: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let extension = path
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| extension.to_owned());
    path.with_file_name(format!("{stem}-{mode}.{extension}"))
}

fn print_checks(report: &SweepReport) {
    let mut err = std::io::stderr().lock();
    for check in &report.checks {
        let tag = if check.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(err, "{tag} [{}] {}: {}", report.mode, check.name, check.detail);
    }
}

fn run_mode(config: &SweepConfig, out: Option<PathBuf>) -> Result<bool, Error> {
    config.validate()?;
    let report = run(config)?;
    match &out {
        Some(path) => emit_report(&report, config.format, path)?,
        None => {
            let text = report.render(config.format)?;
            std::io::stdout().write_all(text.as_bytes()).map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
        }
    }
    print_checks(&report);
    Ok(report.passed())
}

fn execute(command: Command) -> Result<bool, Error> {
    let (modes, options): (&[Mode], Options) = match command {
        Command::Eigen(o) => (&[Mode::Eigen], o),
        Command::GroundState(o) => (&[Mode::GroundState], o),
        Command::GammaCheck(o) => (&[Mode::GammaCheck], o),
        Command::Sweep(o) => (&Mode::ALL, o),
    };
    let base = options.config()?;
    let mut passed = true;
    for (i, &mode) in modes.iter().enumerate() {
        let config = SweepConfig { mode, ..base.clone() };
        let out = match (&base.out, modes.len()) {
            (Some(path), 1) => Some(path.clone()),
            (Some(path), _) => Some(mode_path(path, mode, config.format.extension())),
            (None, _) => {
                if i > 0 {
                    println!();
                }
                None
            }
        };
        passed &= run_mode(&config, out)?;
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn mode_paths() {
        let p = mode_path(Path::new("out/run.csv"), Mode::GroundState, "json");
        assert_eq!(p, PathBuf::from("out/run-ground-state.csv"));
        let p = mode_path(Path::new("run"), Mode::Eigen, "json");
        assert_eq!(p, PathBuf::from("run-eigen.json"));
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.txt");
        std::fs::write(&path, "n = 64\np = 3\n").unwrap();
        let cli = Cli::try_parse_from(["fracplap", "eigen", "--config", path.to_str().unwrap(), "--n", "32"]).unwrap();
        let Command::Eigen(options) = cli.command else { unreachable!() };
        let config = options.config().unwrap();
        assert_eq!((config.num_elements, config.p), (32, 3.0));
    }

    #[test]
    fn bad_flag_names_the_flag() {
        let cli = Cli::try_parse_from(["fracplap", "eigen", "--tol", "abc"]).unwrap();
        let Command::Eigen(options) = cli.command else { unreachable!() };
        let message = options.config().unwrap_err().to_string();
        assert!(message.contains("--tol"), "{message}");
    }
}
