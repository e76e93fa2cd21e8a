fn main() {
    std::process::exit(lemniscate::cli::main_with_args(std::env::args()));
}
