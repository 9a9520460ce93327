fn main() {
    std::process::exit(dcl_cli::main_with_args(std::env::args_os()));
}
