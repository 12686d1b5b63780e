fn main() {
    std::process::exit(armwing::cli::cli_main(std::env::args_os()));
}
