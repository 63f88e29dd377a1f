//! `tcomp` binary entry point: parse, dispatch, map errors to exit codes.

use clap::error::ErrorKind;
use clap::Parser;
use tcomp_cli::commands::{run, Cli};

fn main() {
    // Progress lines (one per outer solver iteration) go to stderr at info
    // level unless RUST_LOG says otherwise; stdout stays machine-readable.
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    match run(cli) {
        Ok(summary) => println!("{summary}"),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
