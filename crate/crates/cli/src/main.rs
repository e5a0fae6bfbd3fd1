fn main() {
    std::process::exit(arraymirror::run(std::env::args_os()));
}
