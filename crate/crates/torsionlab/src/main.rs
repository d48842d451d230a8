use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(torsionlab::cli::main_with(std::env::args_os()))
}
