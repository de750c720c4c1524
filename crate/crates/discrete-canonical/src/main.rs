fn main() {
    std::process::exit(discrete_canonical::cli::run(std::env::args_os()));
}
