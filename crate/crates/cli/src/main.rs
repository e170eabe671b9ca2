fn main() {
    std::process::exit(bvp4_cli::run(std::env::args_os()));
}
