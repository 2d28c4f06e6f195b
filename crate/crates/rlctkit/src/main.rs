fn main() {
    std::process::exit(rlctkit::cli::run(std::env::args()));
}
