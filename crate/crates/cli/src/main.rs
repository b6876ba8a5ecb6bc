use std::process::ExitCode;

fn main() -> ExitCode {
    oqec_cli::run(std::env::args_os())
}
