use clap::{Parser, Subcommand};
use fracwiener_cli::experiments::{column_reference, list_experiments};
use fracwiener_cli::{run, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "fracwiener", version, about = "Run fractional Wiener integral experiments")]
#[command(after_long_help = long_help())]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory, overriding the `output` key of the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit with status 1 when the run produced warnings.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// List experiment kinds with their required and optional keys.
    ListExperiments,
}

fn long_help() -> String {
    format!(
        "Exit status: 0 when every assertion passes, 1 on a failed assertion \
         (or a warning under --strict), 2 on an invalid config.\n\nCSV columns:\n{}",
        column_reference()
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match cli.command {
        Command::ListExperiments => {
            print!("{}", list_experiments());
            ExitCode::SUCCESS
        }
        Command::Run { config } => {
            let opts = RunOptions {
                out: cli.out,
                strict: cli.strict,
            };
            match run(&config, &opts) {
                Ok(report) => {
                    eprint!("{}", report.failure_table());
                    println!(
                        "{}: {} ({} files in {})",
                        config.display(),
                        if report.pass() { "pass" } else { "FAIL" },
                        report.files.len(),
                        report.output_dir.display()
                    );
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
