use clap::Parser;

fn main() {
    let cli = padic_gibbs::cli::Cli::parse();
    std::process::exit(padic_gibbs::cli::main_with(cli));
}
