fn main() {
    std::process::exit(tipping::cli::main_with(std::env::args_os()));
}
