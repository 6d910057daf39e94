mod args;
mod commands;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::{Failure, Output};

fn execute(cli: &Cli) -> Result<String, Failure> {
    let threads = cli.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::usage(format!("--threads: {e}")))?;
    let output = pool.install(|| commands::run(&cli.command, cli.strict))?;
    Ok(match output {
        Output::Structured(o) => render::render(&o, cli.output),
        Output::Raw(s) => s,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::usage(format!("--out {}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure {
            code: 1,
            message: e.to_string(),
        }),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
