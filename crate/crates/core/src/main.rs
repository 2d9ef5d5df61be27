fn main() {
    std::process::exit(helton_howe::cli::run(std::env::args_os()));
}
