//! `colorcurve` command-line frontend.
//!
//! Exit codes: 0 success, 2 configuration error, 3 input decode error,
//! 4 model fit error, 5 internal error.

mod cli;
mod commands;
mod error;
mod io;
mod settings;

use clap::Parser;
use cli::{Cli, Command};
use error::{CliError, CliResult};
use settings::Settings;
use std::process::ExitCode;

fn run(cli: Cli) -> CliResult<()> {
    let settings = Settings::resolve(&cli.common)?;
    std::fs::create_dir_all(&settings.out_dir).map_err(|e| {
        CliError::Config(format!(
            "output directory {}: {e}",
            settings.out_dir.display()
        ))
    })?;
    match &cli.command {
        Command::Quantize { image } => commands::quantize(&settings, image),
        Command::Fit { image } => commands::fit(&settings, image),
        Command::Classify {
            images,
            shading_min,
            reflectance_max,
        } => {
            let settings = settings.with_thresholds(*shading_min, *reflectance_max)?;
            commands::classify(&settings, images)
        }
        Command::Detect { model, images } => commands::detect_probes(&settings, model, images),
        Command::Recognize { model, images } => {
            commands::recognize_probes(&settings, model, images)
        }
        Command::CompareQuantizers { image } => commands::compare_quantizers(&settings, image),
        Command::RenderSynthetic(args) => commands::render_synthetic(&settings, args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("colorcurve: {e}");
            e.exit_code()
        }
    }
}
