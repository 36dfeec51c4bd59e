fn main() {
    std::process::exit(klm_hifi::cli::main_with_args(std::env::args_os()));
}
