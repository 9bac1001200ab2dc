fn main() {
    std::process::exit(lpforge_cli::run(std::env::args_os()));
}
