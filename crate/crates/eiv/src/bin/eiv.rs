fn main() {
    std::process::exit(eiv::cli::run());
}
