fn main() {
    std::process::exit(predrisk::cli::run(std::env::args_os()));
}
