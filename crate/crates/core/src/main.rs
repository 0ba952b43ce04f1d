fn main() {
    std::process::exit(finhilbert::cli::main_with(std::env::args_os()));
}
