fn main() {
    std::process::exit(hardy_sharp::cli::run(std::env::args_os()));
}
