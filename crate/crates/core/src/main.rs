use clap::Parser;

use skewbidisc::cli::{exit_code, run, Cli, RunConfig};

fn main() {
    let cli = Cli::parse();
    let result = RunConfig::from_cli(&cli).and_then(|cfg| run(&cfg));
    match &result {
        Ok(report) => println!("{}", report.to_json()),
        Err(e) => eprintln!("error: {e}"),
    }
    std::process::exit(exit_code(&result));
}
