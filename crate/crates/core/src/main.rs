use clap::{CommandFactory, Parser};
use recovery_limits::cli::{run, Cli};
use recovery_limits::Error;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command_name();
    match run(cli.command) {
        Ok(status) => ExitCode::from(status as u8),
        Err(err) => {
            eprintln!("error: {err}");
            if matches!(err, Error::Usage(_)) {
                let mut cmd = Cli::command();
                cmd.build();
                let usage = match cmd.find_subcommand_mut(name) {
                    Some(sub) => sub.render_usage(),
                    None => cmd.render_usage(),
                };
                eprintln!("\n{usage}\n\nFor more information, try '--help'.");
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
