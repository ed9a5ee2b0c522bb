fn main() {
    std::process::exit(madic::cli::main_with_args(std::env::args_os()));
}
