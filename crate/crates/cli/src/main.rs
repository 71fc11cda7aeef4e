use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mystery_cli::commands::{cmd_generate, cmd_validate, exit, CliError, GenerateArgs};
use mystery_core::game::GameDefinition;

/// Generate murder mysteries from a knowledge graph, check them, and serve
/// them to a browser client.
#[derive(Parser)]
#[command(name = "mystery", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a game around a victim and write it as JSON.
    Generate(Box<GenerateArgs>),
    /// Check a game file's invariants and solvability.
    Validate { file: PathBuf },
    /// Serve a game file over HTTP.
    Serve {
        file: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(args) => {
            let summary = cmd_generate(&args)?;
            let g = &summary.generation;
            eprintln!(
                "wrote {} ({} suspects, fitness ({}, {}), solution in {} actions)",
                args.out.display(),
                g.suspects.len(),
                g.fitness.victim_links,
                g.fitness.inter_suspect_links,
                g.solution_length
            );
            if args.report.is_none() {
                println!("{}", serde_json::to_string_pretty(&summary).expect("reports serialize"));
            }
            Ok(())
        }
        Command::Validate { file } => {
            let violations = cmd_validate(&file)?;
            if violations.is_empty() {
                println!("PASS {}", file.display());
                return Ok(());
            }
            println!("FAIL {}", file.display());
            for v in &violations {
                println!("  {}: {}", v.code, v.message);
            }
            Err(CliError::new(
                exit::INVALID,
                format!("{} violation(s)", violations.len()),
            ))
        }
        Command::Serve { file, port, host } => {
            let def = GameDefinition::load(&file).map_err(|e| CliError::new(exit::IO, e.to_string()))?;
            let app = mystery_cli::router(def).map_err(|e| CliError::new(exit::INVALID, e.to_string()))?;
            let addr = SocketAddr::new(host, port);
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::new(exit::FAILURE, e.to_string()))?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(addr)
                    .await
                    .map_err(|e| CliError::new(exit::IO, format!("binding {addr}: {e}")))?;
                log::info!("serving {} on http://{addr}", file.display());
                axum::serve(listener, app)
                    .await
                    .map_err(|e| CliError::new(exit::FAILURE, e.to_string()))
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
