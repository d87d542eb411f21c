use clap::Parser;

fn main() {
    let cli = aivsim_cli::Cli::parse();
    match aivsim_cli::run_and_report(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
