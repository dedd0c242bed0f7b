fn main() {
    std::process::exit(lbdd::cli::main_with_args(std::env::args_os()));
}
