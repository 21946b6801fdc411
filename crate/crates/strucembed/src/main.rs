fn main() {
    std::process::exit(strucembed::cli::run(std::env::args()));
}
