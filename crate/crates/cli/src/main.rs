use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use runlab_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match result {
        Ok(code) => match flushed {
            Ok(()) => ExitCode::from(code as u8),
            Err(e) => {
                eprintln!("runlab: {e}");
                ExitCode::from(4)
            }
        },
        Err(e) => {
            eprintln!("runlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
