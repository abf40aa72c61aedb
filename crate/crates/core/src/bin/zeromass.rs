fn main() {
    std::process::exit(zeromass::cli::main());
}
