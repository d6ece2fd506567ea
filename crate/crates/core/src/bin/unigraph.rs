fn main() { std::process::exit(unigraph::cli::main()) }
