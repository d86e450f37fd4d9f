use clap::Parser;

fn main() {
    let cli = kf_cli::Cli::parse();
    match kf_cli::execute(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            std::process::exit(out.code);
        }
        Err(e) => {
            eprintln!("kf: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
