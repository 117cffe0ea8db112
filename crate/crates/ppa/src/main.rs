use clap::Parser;

fn main() {
    let args = ppa::cli::CliArgs::parse();
    if let Err(err) = ppa::cli::execute(args) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
