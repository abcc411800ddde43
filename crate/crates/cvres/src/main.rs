fn main() {
    std::process::exit(cvres::cli::run(std::env::args_os()));
}
