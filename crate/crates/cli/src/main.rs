use std::process::ExitCode;

fn main() -> ExitCode {
    wdn_cli::run()
}
