fn main() {
    std::process::exit(spectrace::run(std::env::args_os()));
}
