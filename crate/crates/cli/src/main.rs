use clap::Parser;
use tomokit_cli::{run::run, Cli};

fn init_threads() {
    if let Ok(v) = std::env::var("TOMOKIT_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring TOMOKIT_THREADS={v}"),
        }
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    init_threads();
    let code = match run(&cli.cmd, &argv) {
        Ok(code) => code,
        Err(e) => {
            match e {
                tomokit_cli::CliError::Numeric(_) => eprintln!("{}", e.to_json()),
                _ => eprintln!("error: {e}"),
            }
            e.exit_code()
        }
    };
    std::process::exit(code);
}
