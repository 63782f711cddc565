use clap::Parser;

use mcodes_cli::{render_pretty, run, Cli, CliError};

// Exit codes: 0 success, 1 usage error, 2 domain error.
fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            if cli.pretty {
                print!("{}", render_pretty(&report));
            } else {
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Err(CliError::Domain { code, message }) => {
            let err = serde_json::json!({"error": {"code": code, "message": message}});
            eprintln!("{}", serde_json::to_string(&err).expect("error serializes"));
            std::process::exit(2);
        }
    }
}
