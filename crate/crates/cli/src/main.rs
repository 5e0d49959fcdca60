use clap::Parser;

use cavity_raman_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("cavity-raman: {e}");
        std::process::exit(e.exit_code());
    }
}
