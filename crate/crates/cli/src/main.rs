fn main() {
    std::process::exit(breakscan_cli::main_with_args(std::env::args_os()));
}
