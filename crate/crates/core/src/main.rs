use clap::Parser;

use area_angle::cli::{self, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version are not errors; bad flags are input errors
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    std::process::exit(cli::run(cli));
}
