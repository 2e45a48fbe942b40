fn main() {
    let mut stdout = std::io::stdout();
    std::process::exit(rdnet::cli::run(std::env::args_os(), &mut stdout));
}
