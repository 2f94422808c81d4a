fn main() {
    std::process::exit(rediswap::cli::run());
}
