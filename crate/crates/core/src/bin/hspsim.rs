use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hspsim::phasematch::{preset, preset_names};
use hspsim::scenario::{load_file, run, validate_file, RunOptions};

/// Heralded single photons, seeded DFG and HOM interference from scenario files.
#[derive(Parser)]
#[command(name = "hspsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario and write its outputs plus manifest.json.
    Run {
        scenario: PathBuf,
        /// Output directory; defaults to `out/<scenario name>`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the JSA grid size per axis.
        #[arg(long)]
        grid_points: Option<usize>,
        /// Text recorded verbatim in the manifest. No randomness is involved.
        #[arg(long)]
        seed_metadata: Option<String>,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a scenario file and report every problem found.
    Validate { scenario: PathBuf },
    /// Crystal dispersion presets.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
}

#[derive(Subcommand)]
enum PresetsAction {
    /// List the available presets.
    List,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            out_dir,
            grid_points,
            seed_metadata,
            threads,
        } => {
            let result = load_file(&scenario).and_then(|s| {
                let options = RunOptions {
                    out_dir: out_dir.unwrap_or_else(|| PathBuf::from("out").join(&s.name)),
                    grid_points,
                    seed_metadata,
                    threads,
                };
                let manifest = run(&s, &options)?;
                Ok((options.out_dir, manifest))
            });
            match result {
                Ok((dir, manifest)) => {
                    for o in &manifest.outputs {
                        println!("{}  {}", o.sha256, dir.join(&o.path).display());
                    }
                    println!(
                        "manifest: {}",
                        dir.join(hspsim::scenario::MANIFEST_FILE).display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Command::Validate { scenario } => match validate_file(&scenario) {
            Ok(diags) if diags.is_empty() => {
                println!("{}: ok", scenario.display());
                ExitCode::SUCCESS
            }
            Ok(diags) => {
                for d in &diags {
                    eprintln!("{}: {d}", scenario.display());
                }
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code())
            }
        },
        Command::Presets {
            action: PresetsAction::List,
        } => {
            for name in preset_names() {
                let p = preset(name).expect("listed preset exists");
                println!("{name}\t{}", p.description);
            }
            ExitCode::SUCCESS
        }
    }
}
