fn main() {
    std::process::exit(eftower::cli::run());
}
