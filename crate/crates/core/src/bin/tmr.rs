fn main() {
    std::process::exit(tm_radial::cli::run(std::env::args_os()));
}
