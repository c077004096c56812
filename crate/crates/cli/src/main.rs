fn main() {
    std::process::exit(ksblow::main_with(std::env::args_os()));
}
