use clap::Parser;

fn main() {
    let cli = spinbus_cli::Cli::parse();
    std::process::exit(spinbus_cli::run(cli));
}
