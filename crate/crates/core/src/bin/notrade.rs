fn main() {
    std::process::exit(notrade_band::cli::run(std::env::args_os()));
}
