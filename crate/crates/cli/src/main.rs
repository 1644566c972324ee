fn main() {
    std::process::exit(paract_cli::run(std::env::args_os()));
}
