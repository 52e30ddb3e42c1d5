fn main() {
    std::process::exit(corner_blowup::cli::main_with(std::env::args_os()));
}
