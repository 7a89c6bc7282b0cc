fn main() {
    std::process::exit(topicscope_cli::run(std::env::args_os()));
}
