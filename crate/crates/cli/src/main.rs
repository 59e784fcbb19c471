fn main() {
    std::process::exit(lpvort_cli::app::run_cli(std::env::args_os()));
}
