use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = quasiopt_cli::Args::parse();
    if let Err(e) = quasiopt_cli::run(&args) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
