use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use ep_coupler_cli::{run, write_output, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = run(&cli.command).and_then(|out| {
        let args: Vec<String> = std::env::args().collect();
        write_output(cli.command.out_dir(), &out, &args, start.elapsed())
    });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
