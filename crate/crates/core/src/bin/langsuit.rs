fn main() {
    std::process::exit(langsuit::cli::run(std::env::args_os()));
}
