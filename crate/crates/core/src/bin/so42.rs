fn main() {
    std::process::exit(so42::cli::run(std::env::args_os()));
}
