fn main() -> std::process::ExitCode {
    srir_tools::cli::main_with_args(std::env::args_os())
}
