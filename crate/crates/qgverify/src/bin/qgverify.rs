fn main() {
    std::process::exit(qgverify::cli::run(std::env::args_os()));
}
