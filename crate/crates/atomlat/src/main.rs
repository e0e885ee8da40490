fn main() {
    std::process::exit(atomlat::cli::run(std::env::args()));
}
