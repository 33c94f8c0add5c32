fn main() {
    std::process::exit(slabeling::cli::main_with_args(std::env::args_os()));
}
