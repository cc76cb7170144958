fn main() {
    std::process::exit(normloc::cli::main());
}
