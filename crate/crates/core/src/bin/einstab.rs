fn main() {
    std::process::exit(einstab::cli::main_with_args(std::env::args_os()));
}
