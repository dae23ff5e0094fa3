fn main() {
    std::process::exit(qfs_cli::main_with_args(std::env::args_os()));
}
