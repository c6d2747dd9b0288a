fn main() -> std::process::ExitCode {
    kakeya_lab::cli::main_with_args(std::env::args_os())
}
