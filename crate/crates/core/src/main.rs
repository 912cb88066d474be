fn main() {
    std::process::exit(sgspec::cli::main());
}
