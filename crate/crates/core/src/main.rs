fn main() {
    std::process::exit(monocat::cli::main());
}
