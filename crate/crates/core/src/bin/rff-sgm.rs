use clap::Parser;
use rff_sgm::cli::{self, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let args = match cli::expand_config_file(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(cli::exit_code(&e));
        }
    };
    let parsed = Cli::parse_from(args);
    if let Err(e) = cli::run(parsed) {
        eprintln!("error: {e}");
        std::process::exit(cli::exit_code(&e));
    }
}
