fn main() {
    std::process::exit(concord::cli::run_cli(std::env::args_os()));
}
