fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let (code, stdout, stderr) = semimf::cli::run(&argv);
    print!("{}", stdout);
    eprint!("{}", stderr);
    std::process::exit(code);
}
