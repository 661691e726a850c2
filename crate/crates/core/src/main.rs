fn main() { std::process::exit(weilrep::cli::run(std::env::args_os())); }
