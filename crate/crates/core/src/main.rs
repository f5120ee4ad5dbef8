fn main() {
    std::process::exit(enso_gspt::cli::run(std::env::args_os()));
}
