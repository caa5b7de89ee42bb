fn main() {
    std::process::exit(polyprod::report::run());
}
