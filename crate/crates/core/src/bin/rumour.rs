use std::io::{BufWriter, Write};

fn main() {
    let mut out = BufWriter::new(std::io::stdout().lock());
    let code = rumour::cli::run(std::env::args_os(), &mut out, &mut std::io::stderr().lock());
    let code = if out.flush().is_err() { rumour::cli::EXIT_FAILURE } else { code };
    drop(out);
    std::process::exit(code);
}
