fn main() {
    std::process::exit(hedgehog::cli::main_with_args(std::env::args_os()));
}
