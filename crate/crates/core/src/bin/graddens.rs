use std::process::ExitCode;

use graddens::cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    if let Ok(v) = std::env::var("GRADDENS_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(threads) => graddens::exec::configure_threads(threads),
            Err(_) => log::warn!("ignoring GRADDENS_THREADS={v}: not a thread count"),
        }
    }

    let config = match cli::parse_args(std::env::args_os()) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    ExitCode::from(cli::dispatch(&config) as u8)
}
