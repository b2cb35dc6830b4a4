fn main() {
    std::process::exit(ivlab::cli::run(std::env::args_os()));
}
