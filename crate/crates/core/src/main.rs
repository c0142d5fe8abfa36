fn main() {
    std::process::exit(polyprg::cli::main_entry());
}
