fn main() {
    std::process::exit(padic_betti::cli::run());
}
