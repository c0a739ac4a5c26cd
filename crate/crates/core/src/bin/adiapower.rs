fn main() {
    std::process::exit(adiapower::cli::main_with_args(std::env::args_os()));
}
