use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let status = lexnorm::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    status.into()
}
