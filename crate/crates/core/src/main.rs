fn main() {
    std::process::exit(nlcrit::cli::main_with_args(std::env::args_os()));
}
