use std::path::PathBuf;
use std::process::ExitCode;

use benjamin_cli::config::{self, LoadedConfig};
use benjamin_cli::runner::{self, exit, RunFailure};
use benjamin_cli::{output, registry};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "benjamin", version, about = "Solitary waves and dynamics of Benjamin-type equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment given as a config file or a bundled config name.
    Run {
        config: String,
        /// Directory for the run's artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List bundled configs.
    List,
    /// Print a bundled config.
    Show { name: String },
    /// Re-check a report.json; exits 5 if any check failed.
    Verify { report: PathBuf },
}

fn load(arg: &str) -> Result<LoadedConfig, RunFailure> {
    let path = PathBuf::from(arg);
    if path.is_file() {
        return config::load(&path).map_err(|e| RunFailure::config(e.0));
    }
    match registry::find(arg) {
        Some(b) => config::parse(b.text, std::env::current_dir().unwrap_or_default())
            .map_err(|e| RunFailure::config(format!("bundled {}: {}", b.name, e.0))),
        None => Err(RunFailure::config(format!("{arg}: no such file or bundled config"))),
    }
}

fn run(arg: &str, out: Option<PathBuf>) -> i32 {
    let cfg = match load(arg) {
        Ok(c) => c,
        Err(f) => {
            eprintln!("{}", f.to_json());
            return f.code;
        }
    };
    let dir = out.unwrap_or_else(|| runner::output_dir(&cfg));
    match runner::run(&cfg, &dir) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            println!("artifacts: {}", outcome.dir.display());
            outcome.exit_code()
        }
        Err(f) => {
            eprintln!("{}", f.to_json());
            f.code
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config, out } => run(&config, out),
        Command::List => {
            for b in registry::BUNDLED {
                let kind = config::parse(b.text, ".").map(|c| c.config.kind.as_str()).unwrap_or("invalid");
                println!("{:<28} {kind}", b.name);
            }
            exit::OK
        }
        Command::Show { name } => match registry::find(&name) {
            Some(b) => {
                print!("{}", b.text);
                exit::OK
            }
            None => {
                eprintln!("no bundled config named {name}");
                exit::CONFIG
            }
        },
        Command::Verify { report } => match output::read_report(&report) {
            Ok(r) => {
                print!("{r}");
                if r.passed() {
                    exit::OK
                } else {
                    exit::CHECKS_FAILED
                }
            }
            Err(e) => {
                eprintln!("{}: {e}", report.display());
                exit::IO
            }
        },
    };
    ExitCode::from(code as u8)
}
