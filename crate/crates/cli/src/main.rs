use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use shallowscope_cli::{files, render, run, Cli, CliError, ExperimentConfig};

fn main() -> ExitCode {
    // clap exits with 2 on usage errors
    let cli = Cli::parse();
    match go(cli.into()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn go(config: ExperimentConfig) -> Result<(), CliError> {
    if let Some(t) = config.threads {
        if t == 0 {
            return Err(CliError::config("threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::config("threads", e.to_string()))?;
    }
    let (envelope, table) = run(&config)?;
    let text = render(&config, &envelope, table)?;
    match &config.output {
        Some(path) => files::write_text(path, &text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Output {
                path: "<stdout>".into(),
                source,
            }),
    }
}
