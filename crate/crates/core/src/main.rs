fn main() {
    std::process::exit(catenoid::cli::run(std::env::args()));
}
