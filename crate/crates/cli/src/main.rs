fn main() {
    std::process::exit(cvcensus_cli::run(std::env::args_os()));
}
