use l2ext::cli;

fn main() {
    let code = match cli::run(std::env::args()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
