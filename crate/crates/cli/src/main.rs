fn main() {
    std::process::exit(harmonic_sieve_cli::run(std::env::args_os()));
}
