use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use mystery_core::assemble::{AssembleConfig, FactAllowlist, NameList, Resources};
use mystery_core::dialog::Grammar;
use mystery_core::engine::{validate_with_oracle, Violation};
use mystery_core::game::GameDefinition;
use mystery_core::ingest::{fetch_neighborhood, DataSource, FetchBudget, IngestError, TruncationReport};
use mystery_core::kg::{EntityId, KindConfig};
use mystery_core::pipeline::{generate, GenerationReport, PipelineConfig, PipelineError};
use mystery_core::suspects::{EvolutionConfig, SelectError};
use serde::Serialize;

/// Process exit codes. These are part of the command-line contract.
pub mod exit {
    pub const OK: i32 = 0;
    /// Unexpected internal failure.
    pub const FAILURE: i32 = 1;
    /// Bad arguments or configuration.
    pub const USAGE: i32 = 2;
    /// A file could not be read, parsed or written.
    pub const IO: i32 = 3;
    /// Too few candidate suspects around the victim.
    pub const INFEASIBLE: i32 = 4;
    /// No suspect set could be linked to the victim within the edge bound.
    pub const NO_PATH: i32 = 5;
    /// The generated game could not be solved.
    pub const UNSOLVABLE: i32 = 6;
    /// A game definition breaks one or more invariants.
    pub const INVALID: i32 = 7;
    /// The remote endpoint kept failing.
    pub const NETWORK: i32 = 8;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        let code = match &e {
            IngestError::Io { .. } | IngestError::Parse { .. } => exit::IO,
            IngestError::InvalidConfig(_) => exit::USAGE,
            IngestError::Network { .. } => exit::NETWORK,
        };
        CliError::new(code, e.to_string())
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let code = match &e {
            PipelineError::Victim(_) => exit::USAGE,
            PipelineError::Select(SelectError::GenerationInfeasible { .. }) => exit::INFEASIBLE,
            PipelineError::Select(_) => exit::USAGE,
            PipelineError::NoPathFound { .. } => exit::NO_PATH,
            PipelineError::Unsolvable(_) => exit::UNSOLVABLE,
            PipelineError::Invalid(_) => exit::INVALID,
            PipelineError::Assemble(_) => exit::FAILURE,
        };
        let mut message = e.to_string();
        if let PipelineError::Unsolvable(report) = &e {
            if let Ok(detail) = serde_json::to_string_pretty(report) {
                message.push('\n');
                message.push_str(&detail);
            }
        }
        CliError::new(code, message)
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::new(exit::IO, format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Victim IRI, or a bare name resolved against the DBpedia resource namespace.
    #[arg(long)]
    pub victim: String,
    /// N-Triples dump path or SPARQL endpoint URL.
    #[arg(long)]
    pub source: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the game file.
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the generation report; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub suspects: usize,
    #[arg(long, default_value_t = 50)]
    pub pop: usize,
    #[arg(long, default_value_t = 500)]
    pub gens: usize,
    #[arg(long, default_value_t = 4)]
    pub max_edges: usize,
    #[arg(long, default_value_t = mystery_core::paths::DEFAULT_MAX_PATHS)]
    pub max_paths: usize,
    /// Locked buildings; defaults to two, clamped to what the layout allows.
    #[arg(long)]
    pub locks: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub facts: usize,
    #[arg(long, default_value_t = mystery_core::pipeline::DEFAULT_RETRIES)]
    pub retries: usize,
    #[arg(long, default_value_t = FetchBudget::default().max_hops)]
    pub max_hops: usize,
    #[arg(long, default_value_t = FetchBudget::default().max_entities)]
    pub max_entities: usize,
    #[arg(long, default_value_t = FetchBudget::default().max_triples_per_entity)]
    pub max_triples: usize,
    /// Response cache for remote sources.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub kinds: Option<PathBuf>,
    #[arg(long)]
    pub grammar: Option<PathBuf>,
    #[arg(long)]
    pub allowlist: Option<PathBuf>,
    #[arg(long)]
    pub names: Option<PathBuf>,
}

impl GenerateArgs {
    /// Defaults for everything but the four required arguments.
    pub fn new(victim: &str, source: &str, seed: u64, out: PathBuf) -> Self {
        GenerateArgs {
            victim: victim.to_string(),
            source: source.to_string(),
            seed,
            out,
            report: None,
            suspects: 3,
            pop: 50,
            gens: 500,
            max_edges: 4,
            max_paths: mystery_core::paths::DEFAULT_MAX_PATHS,
            locks: None,
            facts: 3,
            retries: mystery_core::pipeline::DEFAULT_RETRIES,
            max_hops: FetchBudget::default().max_hops,
            max_entities: FetchBudget::default().max_entities,
            max_triples: FetchBudget::default().max_triples_per_entity,
            cache_dir: None,
            kinds: None,
            grammar: None,
            allowlist: None,
            names: None,
        }
    }

    pub fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            victim: victim_iri(&self.victim),
            evolution: EvolutionConfig {
                n: self.suspects,
                pop_size: self.pop,
                generations: self.gens,
                ..EvolutionConfig::default()
            },
            max_edges: self.max_edges,
            max_paths: self.max_paths,
            assemble: AssembleConfig {
                lock_count: self.locks,
                facts_per_suspect: self.facts,
                ..AssembleConfig::default()
            },
            rng_seed: self.seed,
            retries: self.retries,
        }
    }

    fn resources(&self) -> Result<Resources, CliError> {
        let mut res = Resources::default();
        if let Some(p) = &self.grammar {
            res.grammar = Grammar::load(p).map_err(|e| CliError::new(exit::IO, e.to_string()))?;
        }
        if let Some(p) = &self.allowlist {
            res.allowlist = FactAllowlist::load(p).map_err(|e| CliError::new(exit::IO, e.to_string()))?;
        }
        if let Some(p) = &self.names {
            res.names = NameList::load(p).map_err(|e| io_error(p, e))?;
        }
        Ok(res)
    }
}

/// `Albert Einstein` becomes `http://dbpedia.org/resource/Albert_Einstein`;
/// full IRIs pass through.
pub fn victim_iri(victim: &str) -> String {
    if victim.contains("://") {
        victim.to_string()
    } else {
        format!("http://dbpedia.org/resource/{}", victim.trim().replace(' ', "_"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerateSummary {
    pub generation: GenerationReport,
    pub ingest: TruncationReport,
}

/// Ingests, generates and writes the game file; the summary is also written
/// to `args.report` when set.
pub fn cmd_generate(args: &GenerateArgs) -> Result<GenerateSummary, CliError> {
    let kinds = match &args.kinds {
        Some(p) => KindConfig::load(p).map_err(|e| CliError::new(exit::IO, e.to_string()))?,
        None => KindConfig::default(),
    };
    let cfg = args.pipeline_config();
    let victim = EntityId::new(cfg.victim.clone()).map_err(|e| CliError::new(exit::USAGE, e.to_string()))?;
    let budget = FetchBudget::new(args.max_entities, args.max_hops, args.max_triples)?;
    let source = DataSource::parse(&args.source)?;
    let res = args.resources()?;

    let crawl = fetch_neighborhood(&source, kinds, &victim, budget, args.cache_dir.clone())?;
    if crawl.report.truncated() {
        log::warn!(
            "neighbourhood truncated: {} entities dropped, {} entities cut short",
            crawl.report.entities_dropped,
            crawl.report.triples_truncated.len()
        );
    }
    let generated = generate(&crawl.graph, &res, &cfg)?;
    fs::write(&args.out, generated.game.to_json()).map_err(|e| io_error(&args.out, e))?;

    let summary = GenerateSummary {
        generation: generated.report,
        ingest: crawl.report,
    };
    if let Some(p) = &args.report {
        let text = serde_json::to_string_pretty(&summary).expect("reports serialize");
        fs::write(p, text).map_err(|e| io_error(p, e))?;
    }
    Ok(summary)
}

/// Loads a game file and lists every broken invariant, including the
/// solvability check.
pub fn cmd_validate(path: &Path) -> Result<Vec<Violation>, CliError> {
    let def = GameDefinition::load(path).map_err(|e| CliError::new(exit::IO, e.to_string()))?;
    Ok(validate_with_oracle(&def))
}
