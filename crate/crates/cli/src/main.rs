fn main() {
    std::process::exit(coot_cli::run(std::env::args_os()));
}
