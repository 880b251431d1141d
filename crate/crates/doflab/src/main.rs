use std::process::ExitCode;

fn main() -> ExitCode {
    doflab::cli::run(std::env::args().skip(1))
}
