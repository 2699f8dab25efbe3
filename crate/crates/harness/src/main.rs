use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mrime_core::suite::Suite;
use mrime_core::Variant;
use mrime_harness::{report_dir, run_campaign, CampaignConfig, ReportSummary};

#[derive(Parser)]
#[command(name = "mrime", version, about = "Run and report RIME / MRIME-CD benchmark campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a campaign described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (overrides the config).
        #[arg(long)]
        workers: Option<usize>,
        /// Base seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rebuild summary and statistics from a campaign directory.
    Report {
        #[arg(long)]
        input: PathBuf,
    },
    /// List benchmark functions of one or both suites.
    ListFunctions {
        #[arg(long)]
        suite: Option<Suite>,
    },
    /// List the optimizer variants and their strategy flags.
    ListVariants,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn print_notices(summary: &ReportSummary) {
    for n in &summary.notices {
        eprintln!("note: {n}");
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run { config, workers, seed } => {
            let mut cfg = CampaignConfig::load(&config)?;
            if workers.is_some() {
                cfg.workers = workers;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let out = run_campaign(&cfg)?;
            let failed: Vec<_> = out.failures().collect();
            for f in &failed {
                eprintln!(
                    "run failed: {} {} run {}: {}",
                    f.job.variant,
                    f.instance,
                    f.job.run,
                    f.result.as_ref().unwrap_err()
                );
            }
            println!(
                "{} runs, {} failed, results in {}",
                out.outcomes.len(),
                failed.len(),
                cfg.output_dir.display()
            );
            match out.report {
                Some(r) => {
                    print_notices(&r);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("statistics skipped: result matrix is incomplete");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Report { input } => {
            let r = report_dir(&input)?;
            print_notices(&r);
            for f in &r.files {
                println!("{}", f.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ListFunctions { suite } => {
            let suites = suite.map_or_else(|| vec![Suite::Cec2017, Suite::Cec2022], |s| vec![s]);
            for s in suites {
                for id in s.function_ids() {
                    println!(
                        "{s}\tF{id}\t{}\t{}\t{}",
                        s.function_class(id)?,
                        s.function_bias(id)?,
                        s.function_name(id)?
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ListVariants => {
            for v in Variant::ALL {
                let f = v.flags();
                let yn = |b: bool| if b { "Y" } else { "N" };
                println!("{v}\tGCLS={}\tABS={}\tSPDM={}", yn(f.gcls), yn(f.abs), yn(f.spdm));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
