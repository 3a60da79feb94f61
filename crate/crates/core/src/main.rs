fn main() {
    std::process::exit(limbel::cli::run_cli(std::env::args()));
}
