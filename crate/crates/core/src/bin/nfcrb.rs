use clap::{Parser, Subcommand};
use nfcrb::cli::{self, ExperimentConfig, RawConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Near-field CRB sweeps to CSV.
#[derive(Parser)]
#[command(name = "nfcrb", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// `section.key=value` override; repeatable.
        #[arg(long = "set", value_name = "K=V")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Monte-Carlo master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write bounds as 10·log10.
        #[arg(long)]
        db: bool,
    },
    /// Run a figure preset.
    Preset {
        name: String,
        #[arg(long = "set", value_name = "K=V")]
        set: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        db: bool,
        /// Print the preset's config file instead of running it.
        #[arg(long)]
        print_config: bool,
    },
    /// List preset names.
    ListPresets,
}

fn load(text: &str, set: &[String], seed: Option<u64>) -> nfcrb::Result<ExperimentConfig> {
    let mut raw = RawConfig::parse(text)?;
    for s in set {
        raw.set(s)?;
    }
    if let Some(seed) = seed {
        raw.set(&format!("monte_carlo.seed={seed}"))?;
    }
    raw.build()
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), ExitCode> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => std::fs::write(p, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", p.display());
            ExitCode::from(cli::EXIT_CONFIG as u8)
        }),
    }
}

fn fail(e: nfcrb::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(cli::exit_code(&e) as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::ListPresets => {
            for n in cli::preset_names() {
                println!("{n}");
            }
            return ExitCode::SUCCESS;
        }
        Command::Run { config, set, out, seed, db } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", config.display());
                    return ExitCode::from(cli::EXIT_CONFIG as u8);
                }
            };
            load(&text, &set, seed).and_then(|cfg| cli::render(&cfg, None, db)).map(|csv| (csv, out))
        }
        Command::Preset { name, set, out, seed, db, print_config } => cli::preset_text(&name)
            .and_then(|text| {
                let cfg = load(&text, &set, seed)?;
                if print_config {
                    Ok(cfg.to_text())
                } else {
                    cli::render(&cfg, Some(&name), db)
                }
            })
            .map(|csv| (csv, out)),
    };
    match result {
        Ok((text, out)) => match emit(&text, out.as_ref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(code) => code,
        },
        Err(e) => fail(e),
    }
}
