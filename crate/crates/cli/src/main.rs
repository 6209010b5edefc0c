use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use epschain_cli::args::Cli;
use epschain_cli::error::CliError;
use epschain_cli::output::to_json;

fn fail(e: &CliError) -> ExitCode {
    let text = to_json(&e.report()).unwrap_or_else(|_| format!("{{\"schema\":1,\"error\":{{\"code\":\"{}\"}}}}\n", e.code()));
    let _ = std::io::stderr().write_all(text.as_bytes());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => return fail(&CliError::ConfigParse(e.to_string().trim_end().to_string())),
    };
    match epschain_cli::dispatch(cli) {
        Ok(Some(text)) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
