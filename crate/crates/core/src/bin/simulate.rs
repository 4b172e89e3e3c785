use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lcflow::config::RawConfig;
use lcflow::runner::run;
use lcflow::verify::{run_suite, Suite};
use lcflow::Error;

#[derive(Parser)]
#[command(
    name = "simulate",
    about = "Nematic liquid crystal flow on a periodic torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config entry, e.g. `--set res=128`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run a built-in verification suite.
    Verify {
        #[arg(long, value_parser = ["spectral", "dynamics", "energy", "monitor"])]
        suite: String,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, overrides } => run_command(&config, &overrides),
        Command::Verify { suite } => verify_command(&suite),
    }
}

fn run_command(path: &PathBuf, overrides: &[String]) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    };
    let config = RawConfig::parse(&text).and_then(|mut raw| {
        for o in overrides {
            raw.set(o)?;
        }
        raw.build()
    });
    let config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };

    let report = match run(&config) {
        Ok(r) => r,
        Err(e @ (Error::InvalidParameter { .. } | Error::UnderResolved { .. })) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    let rec = &report.final_record;
    println!("halt_reason      {}", report.halt_reason);
    println!("final_time       {}", report.final_time);
    println!("steps            {}", report.steps);
    println!("monitor_accum    {}", rec.monitor_accum);
    println!("energy           {}", rec.energy);
    println!("energy_residual  {:e}", report.energy_residual);
    match report.gronwall_c {
        Some(c) => println!("gronwall_c       {c}"),
        None => println!("gronwall_c       undefined"),
    }
    if let Some(dir) = config.effective_output_dir() {
        println!("output           {}", dir.display());
    }
    if report.halt_reason.is_failure() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn verify_command(name: &str) -> ExitCode {
    let suite: Suite = name.parse().expect("clap restricts suite names");
    match run_suite(suite) {
        Ok(checks) => {
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {} failed", checks.len(), failed);
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
