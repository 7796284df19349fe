fn main() {
    std::process::exit(hoplab::app::main_with(std::env::args_os()));
}
