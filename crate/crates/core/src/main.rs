use std::io::Write;

fn main() {
    let (code, out, err) = matchkit::cli::run_from_args(std::env::args_os());
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    let _ = std::io::stderr().lock().write_all(err.as_bytes());
    std::process::exit(code);
}
