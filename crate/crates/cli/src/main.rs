fn main() {
    std::process::exit(specshock_cli::main_with_args(std::env::args_os()));
}
