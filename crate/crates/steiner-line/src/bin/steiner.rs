fn main() {
    std::process::exit(steiner_line::cli_main(std::env::args().collect()));
}
