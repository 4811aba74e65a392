fn main() {
    std::process::exit(saliencymix::cli::run(std::env::args_os()));
}
