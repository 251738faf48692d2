fn main() {
    std::process::exit(tropsa_cli::run_cli(std::env::args_os()));
}
