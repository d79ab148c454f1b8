use std::process::ExitCode;

fn main() -> ExitCode {
    modalcut::cli::run()
}
