fn main() {
    std::process::exit(weakrig::cli::main());
}
