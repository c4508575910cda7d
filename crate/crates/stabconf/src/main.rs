fn main() {
    std::process::exit(stabconf::cli::run(std::env::args_os()));
}
