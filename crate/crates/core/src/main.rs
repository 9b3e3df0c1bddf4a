fn main() {
    std::process::exit(cubic_thue::cli::main_with_args(std::env::args_os()));
}
