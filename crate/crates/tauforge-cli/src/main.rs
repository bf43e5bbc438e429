use clap::Parser;
use tauforge_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let out = run(&cli);
    if let Some(msg) = &out.message {
        eprintln!("tauforge: {}", msg);
    }
    println!("{}", out.json);
    std::process::exit(out.code);
}
