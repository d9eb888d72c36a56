fn main() {
    std::process::exit(d2dshare::cli::main_with_args(std::env::args_os()));
}
