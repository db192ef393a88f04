fn main() {
    std::process::exit(genfitch::cli::main())
}
