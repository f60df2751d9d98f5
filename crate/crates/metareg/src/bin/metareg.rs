fn main() {
    std::process::exit(metareg::cli::cli_main(std::env::args_os()));
}
