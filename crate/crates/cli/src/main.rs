mod config;
mod error;
mod jobs;

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, JobConfig};
use error::CliError;
use jobs::{Outcome, Rendered};

fn labelled_path(out: &Path, label: &str) -> std::path::PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{label}"),
    };
    out.with_file_name(name)
}

fn emit(job: &JobConfig, rendered: &Rendered) -> Result<(), CliError> {
    match rendered {
        Rendered::Json(value) => {
            let mut text =
                serde_json::to_string_pretty(value).expect("report values are serializable");
            text.push('\n');
            match job.out_path() {
                Some(path) => fs::write(path, text)?,
                None => io::stdout().lock().write_all(text.as_bytes())?,
            }
        }
        Rendered::Csv(docs) => match job.out_path() {
            Some(path) => {
                for (label, bytes) in docs {
                    match label {
                        Some(l) => fs::write(labelled_path(path, l), bytes)?,
                        None => fs::write(path, bytes)?,
                    }
                }
            }
            None => {
                let mut stdout = io::stdout().lock();
                for (label, bytes) in docs {
                    if let Some(l) = label {
                        writeln!(stdout, "# {l}")?;
                    }
                    stdout.write_all(bytes)?;
                }
            }
        },
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<Option<String>, CliError> {
    let flags = cli.flags.merged_with_file()?;
    let job = JobConfig::from_flags(cli.command, flags)?;
    let Outcome { rendered, failure } = jobs::run(&job)?;
    emit(&job, &rendered)?;
    Ok(failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("ptcorr: numerical failure: {failure}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("ptcorr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
