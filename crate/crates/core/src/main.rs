fn main() {
    std::process::exit(leolink::cli::run());
}
