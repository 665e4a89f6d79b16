use std::process::ExitCode;

fn main() -> ExitCode {
    rskpp::cli::run(std::env::args_os())
}
