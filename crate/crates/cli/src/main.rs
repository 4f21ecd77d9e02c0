fn main() {
    std::process::exit(cohist_cli::run());
}
