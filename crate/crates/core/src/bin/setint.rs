fn main() {
    std::process::exit(setint::cli::main_with_args(std::env::args_os()));
}
