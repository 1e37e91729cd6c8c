use std::process::ExitCode;

fn main() -> ExitCode {
    tcheby_mobo::cli::main()
}
