fn main() {
    std::process::exit(kdnls::cli::main_with_args(std::env::args_os()));
}
