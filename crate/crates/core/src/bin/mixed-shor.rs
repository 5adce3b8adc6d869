fn main() {
    std::process::exit(mixed_shor::cli::run(std::env::args_os()));
}
