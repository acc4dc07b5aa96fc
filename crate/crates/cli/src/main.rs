mod commands;
mod error;
mod files;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = commands::Cli::parse();
    if let Some(n) = std::env::var("GIS_SPECTRA_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match commands::run(cli) {
        Ok(summary) => {
            println!(
                "{}",
                serde_json::to_string(&summary).expect("summary serializes")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gis-spectra: {e}");
            let summary = serde_json::json!({ "status": "error", "exit_code": e.exit_code(), "message": e.to_string() });
            println!("{summary}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
