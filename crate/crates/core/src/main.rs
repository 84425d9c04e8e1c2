fn main() {
    std::process::exit(holder_lift::harness::cli_main(std::env::args_os()));
}
