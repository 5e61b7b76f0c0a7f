use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = harmonic_simplex::cli::run(std::env::args_os(), &mut io::stdin().lock());
    if let Some(msg) = &outcome.stderr {
        eprintln!("{}", msg.trim_end());
    }
    let mut stdout = io::stdout().lock();
    let _ = writeln!(stdout, "{}", outcome.stdout.trim_end());
    ExitCode::from(outcome.exit_code as u8)
}
