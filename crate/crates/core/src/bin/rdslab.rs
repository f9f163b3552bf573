fn main() {
    std::process::exit(rdslab::harness::cli::main_with_args(std::env::args_os()));
}
