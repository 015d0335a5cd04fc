fn main() {
    std::process::exit(cnls_harness::cli::main_with_args(std::env::args_os()));
}
