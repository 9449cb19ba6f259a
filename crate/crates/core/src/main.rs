fn main() {
    std::process::exit(circular_bargmann::cli::main_with_args(std::env::args_os()));
}
