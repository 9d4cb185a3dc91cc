use clap::Parser;
use ranklab_cli::config::RunConfig;

fn main() {
    let config = RunConfig::parse();
    match ranklab_cli::run(&config) {
        Ok(manifest) => {
            println!("wrote {}", manifest.display());
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
