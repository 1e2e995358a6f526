use clap::Parser;

fn main() {
    let cli = coarsegrain_cli::Cli::parse();
    if let Err(e) = coarsegrain_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
