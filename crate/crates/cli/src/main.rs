fn main() {
    std::process::exit(entanglers_cli::main_with_args(std::env::args_os()));
}
