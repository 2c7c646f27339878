fn main() {
    std::process::exit(elimpar::cli::run(std::env::args_os()));
}
