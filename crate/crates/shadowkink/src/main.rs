fn main() {
    std::process::exit(shadowkink::run(std::env::args_os()));
}
