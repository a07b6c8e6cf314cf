fn main() {
    std::process::exit(recon::cli::main_from_env());
}
