use std::io::{self, IsTerminal};
use std::process::ExitCode;

use clap::Parser;
use horn_limits::cli::{run, style_from_env, RunConfig};

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let style = style_from_env(stdout.is_terminal());
    let code = run(&config, style, &mut stdout.lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
