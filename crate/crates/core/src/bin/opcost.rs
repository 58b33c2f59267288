fn main() {
    std::process::exit(opcost::cli::main_with_args(std::env::args_os()));
}
