fn main() {
    std::process::exit(locmm::cli::run_cli(std::env::args_os()));
}
