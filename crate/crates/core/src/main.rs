fn main() {
    std::process::exit(bosonic_core::cli::main_with_args(std::env::args_os()));
}
