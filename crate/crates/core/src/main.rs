fn main() {
    std::process::exit(siptd::cli::run_from_args(std::env::args_os()));
}
