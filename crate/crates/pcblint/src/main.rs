use std::process::ExitCode;

fn main() -> ExitCode {
    pcblint::cli::main()
}
