use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = stable_plans_cli::run(std::env::args_os(), &mut std::io::stdin().lock());
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(outcome.output.as_bytes());
    let _ = out.flush();
    ExitCode::from(outcome.code as u8)
}
