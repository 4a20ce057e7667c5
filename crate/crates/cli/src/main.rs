fn main() {
    std::process::exit(retrodictor::run(std::env::args_os()));
}
