use clap::error::ErrorKind;
use clap::Parser;
use defocus_optics::cli::{run, CliConfig};

fn main() -> std::process::ExitCode {
    // flag mistakes are usage errors (exit 1); help and version exit clean
    let cli = match CliConfig::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            err.print().expect("write clap error");
            return std::process::ExitCode::from(code);
        }
    };
    std::process::ExitCode::from(run(cli) as u8)
}
