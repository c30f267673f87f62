fn main() {
    std::process::exit(chevorbit_cli::run_main());
}
