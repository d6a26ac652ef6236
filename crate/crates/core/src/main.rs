fn main() -> std::process::ExitCode {
    finadapt::cli::main_from(std::env::args_os())
}
