fn main() {
    std::process::exit(sl2lab::cli::run(std::env::args_os()));
}
