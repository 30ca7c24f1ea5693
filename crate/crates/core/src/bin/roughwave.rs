fn main() { std::process::exit(roughwave::cli::main()); }
