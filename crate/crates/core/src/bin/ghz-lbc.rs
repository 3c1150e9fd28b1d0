use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ghz_lbc::cli::{
    compare_golden, evolve_csv, load_config, parse_csv, run_preset, run_verify, verify_json, verify_status, write_file,
    CliError, Preset, EXIT_CONFIG,
};

/// Entanglement (LBC) dynamics of GHZ states under local noise.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a configuration and write one CSV row per grid point.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate a named family of curves.
    Preset {
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Cross-check every route and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override both route tolerances.
        #[arg(long)]
        tol: Option<f64>,
        /// Compare the sweep CSV against a stored file.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

/// Default cell tolerance for `--golden` comparisons.
const GOLDEN_TOL: f64 = 1e-10;

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Evolve { config, out } => {
            let cfg = load_config(&config)?;
            write_file(&out, &evolve_csv(&cfg)?)
        }
        Command::Preset { name, grid, outdir } => {
            let preset: Preset = name.parse()?;
            for path in run_preset(preset, grid, &outdir)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Verify { config, out, tol, golden } => {
            let cfg = load_config(&config)?;
            let doc = run_verify(&cfg, tol)?;
            write_file(&out, &verify_json(&doc))?;
            verify_status(&doc)?;
            if let Some(golden) = golden {
                let text =
                    std::fs::read_to_string(&golden).map_err(|source| CliError::Read { path: golden, source })?;
                let actual = parse_csv(&evolve_csv(&cfg)?);
                let tol = tol.unwrap_or(GOLDEN_TOL);
                compare_golden(&actual, &parse_csv(&text), tol).map_err(|m| CliError::Golden(m.to_string()))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG as u8) } else { ExitCode::SUCCESS };
        }
    };
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
