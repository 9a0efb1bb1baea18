fn main() {
    std::process::exit(gossipfpp_cli::main_with(std::env::args_os()));
}
