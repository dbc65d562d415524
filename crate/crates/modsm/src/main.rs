use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = modsm::cli::run_args(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    if let Some(e) = &outcome.error {
        if !matches!(e, modsm::CliError::Usage(_) if outcome.stderr.contains(&e.to_string())) {
            eprintln!("error: {e}");
        }
    }
    std::io::stdout().flush().ok();
    ExitCode::from(outcome.exit_code() as u8)
}
