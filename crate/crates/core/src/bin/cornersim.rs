fn main() {
    let code = cornersim::cli::main_from(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
