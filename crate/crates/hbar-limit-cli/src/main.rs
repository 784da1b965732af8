use std::process::ExitCode;

use hbar_limit_cli::{execute, parse_invocation, CliError, EXIT_RUNTIME, EXIT_USAGE};

/// HBAR_LIMIT_THREADS caps both the rayon pool and faer's kernels.
fn configure_threads() -> Result<(), CliError> {
    let n = match std::env::var("HBAR_LIMIT_THREADS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("HBAR_LIMIT_THREADS must be a positive integer, got `{s}`")))?,
        Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    faer::set_global_parallelism(if n == 1 { faer::Par::Seq } else { faer::Par::rayon(n) });
    Ok(())
}

fn main() -> ExitCode {
    let code = configure_threads()
        .and_then(|_| parse_invocation(std::env::args_os().skip(1)))
        .and_then(|inv| execute(&inv));
    match code {
        Ok(c) => ExitCode::from(c as u8),
        Err(CliError::Help(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            // clap messages already carry their "error:" prefix
            if msg.starts_with("error:") {
                eprint!("{msg}");
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(EXIT_USAGE as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME as u8)
        }
    }
}
