fn main() {
    std::process::exit(gausscap::cli::run());
}
