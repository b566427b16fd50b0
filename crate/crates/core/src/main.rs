fn main() {
    std::process::exit(detlab_core::cli::run(std::env::args_os()));
}
