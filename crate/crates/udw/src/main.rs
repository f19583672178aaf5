fn main() {
    std::process::exit(udw::cli::main_with(std::env::args_os()));
}
