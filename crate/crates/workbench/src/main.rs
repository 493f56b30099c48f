fn main() {
    std::process::exit(evalbench::cli::run(std::env::args_os()));
}
