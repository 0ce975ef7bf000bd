fn main() {
    std::process::exit(lexiport::cli::run(std::env::args_os()));
}
