fn main() {
    std::process::exit(ddgl2_cli::run(std::env::args_os()));
}
