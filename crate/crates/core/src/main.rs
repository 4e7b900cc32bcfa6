fn main() {
    std::process::exit(trawlsim::cli::run(std::env::args_os()));
}
