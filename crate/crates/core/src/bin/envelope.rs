fn main() {
    std::process::exit(envelope_core::cli::cli_main(std::env::args_os()));
}
