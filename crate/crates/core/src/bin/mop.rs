fn main() {
    std::process::exit(mopalg::cli::run(std::env::args_os()));
}
