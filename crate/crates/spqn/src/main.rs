use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(spqn::cli::run(std::env::args_os()))
}
