fn main() {
    std::process::exit(pbessel::cli::run(std::env::args_os()));
}
