use std::process::ExitCode;

fn main() -> ExitCode {
    cecsim::cli::main_with(std::env::args_os())
}
