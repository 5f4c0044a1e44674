fn main() {
    std::process::exit(qkd_timeshift::cli::main_from_env());
}
