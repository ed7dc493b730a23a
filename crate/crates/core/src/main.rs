fn main() { std::process::exit(mirror_gamma::cli::cli_main(std::env::args().collect())); }
