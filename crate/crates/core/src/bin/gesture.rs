fn main() -> std::process::ExitCode {
    gesture_core::cli::main_with_args(std::env::args_os())
}
