fn main() {
    std::process::exit(entgraph_cli::run(std::env::args_os()));
}
