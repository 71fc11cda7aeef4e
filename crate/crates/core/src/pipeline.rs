//! End-to-end generation from a loaded graph.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assemble::{assemble, AssembleConfig, AssembleError, Plot, Resources};
use crate::engine::oracle::{solve, OracleResult, UnsolvableReport};
use crate::engine::{validate, Violation};
use crate::game::GameDefinition;
use crate::kg::{EntityId, KgError, KnowledgeGraph};
use crate::paths::{find_paths, select_best_path, ArticlePath, PathScore, DEFAULT_MAX_EDGES, DEFAULT_MAX_PATHS};
use crate::rng::stage_rng;
use crate::suspects::{build_pool, evolve, pick_culprit, EvolutionConfig, FitnessPair, SelectError, SuspectGenome};

/// How many lower-ranked genomes to try after the best one fails.
pub const DEFAULT_RETRIES: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub victim: String,
    /// `evolution.rng_seed` is overwritten by `rng_seed`.
    pub evolution: EvolutionConfig,
    pub max_edges: usize,
    pub max_paths: usize,
    pub assemble: AssembleConfig,
    pub rng_seed: u64,
    pub retries: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            victim: String::new(),
            evolution: EvolutionConfig::default(),
            max_edges: DEFAULT_MAX_EDGES,
            max_paths: DEFAULT_MAX_PATHS,
            assemble: AssembleConfig::default(),
            rng_seed: 0,
            retries: DEFAULT_RETRIES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathReport {
    pub suspect: EntityId,
    pub nodes: Vec<EntityId>,
    pub score: PathScore,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ObjectCounts {
    pub cities: usize,
    pub buildings: usize,
    pub npcs: usize,
    pub items: usize,
    pub clues: usize,
    pub facts: usize,
    pub locks: usize,
    /// Distinct path entities turned into game objects.
    pub path_objects: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenerationReport {
    pub victim: EntityId,
    pub graph_triples: usize,
    pub pool_size: usize,
    pub fitness: FitnessPair,
    pub suspects: Vec<EntityId>,
    pub culprit: EntityId,
    /// Genomes rejected before the chosen one, with the reason.
    pub rejected: Vec<String>,
    pub paths: Vec<PathReport>,
    pub objects: ObjectCounts,
    pub solution_length: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid victim IRI: {0}")]
    Victim(#[from] KgError),
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error("no usable suspect set after {} attempt(s): {}", .attempts.len(), .attempts.join("; "))]
    NoPathFound { attempts: Vec<String> },
    #[error(transparent)]
    Assemble(#[from] AssembleError),
    #[error("generated game is invalid: {}", .0.iter().map(|v| format!("{}: {}", v.code, v.message)).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("generated game is unsolvable: {}", .0.reason)]
    Unsolvable(Box<UnsolvableReport>),
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub game: GameDefinition,
    pub report: GenerationReport,
}

/// The best path to each member, avoiding other suspects along the way.
fn plan_paths(
    graph: &KnowledgeGraph,
    victim: &EntityId,
    genome: &SuspectGenome,
    cfg: &PipelineConfig,
) -> Result<Vec<(ArticlePath, PathScore)>, String> {
    genome
        .members()
        .iter()
        .map(|s| {
            let paths: Vec<ArticlePath> = find_paths(graph, victim, s, cfg.max_edges, cfg.max_paths)
                .into_iter()
                .filter(|p| !p.interior().iter().any(|x| genome.contains(x)))
                .collect();
            select_best_path(&paths, graph).ok_or_else(|| {
                format!(
                    "no path to {} within {} edges in {genome}",
                    s.local_name(),
                    cfg.max_edges
                )
            })
        })
        .collect()
}

/// pool → evolve → paths → assemble → validate → oracle.
pub fn generate(graph: &KnowledgeGraph, res: &Resources, cfg: &PipelineConfig) -> Result<Generated, PipelineError> {
    let victim = EntityId::new(cfg.victim.clone())?;
    let evo_cfg = EvolutionConfig {
        rng_seed: cfg.rng_seed,
        ..cfg.evolution
    };
    evo_cfg.validate()?;
    let pool = build_pool(graph, &victim, evo_cfg.n)?;
    log::info!("suspect pool of {} for {}", pool.len(), victim);
    let evo = evolve(graph, &victim, &pool, &evo_cfg)?;

    let mut rejected = Vec::new();
    for (genome, fitness) in evo.ranked.iter().take(cfg.retries + 1) {
        let planned = match plan_paths(graph, &victim, genome, cfg) {
            Ok(p) => p,
            Err(why) => {
                log::warn!("{why}");
                rejected.push(why);
                continue;
            }
        };
        let culprit = pick_culprit(genome, &mut stage_rng(cfg.rng_seed, "culprit"));
        let paths: Vec<ArticlePath> = planned.iter().map(|(p, _)| p.clone()).collect();
        let plot = Plot {
            graph,
            victim: &victim,
            suspects: genome.members(),
            culprit: &culprit,
            paths: &paths,
            seed: cfg.rng_seed,
        };
        let assembly = match assemble(&plot, res, &cfg.assemble) {
            Ok(a) => a,
            Err(AssembleError::NoAdmissibleFacts { suspect }) => {
                let why = format!("{} has no admissible facts in {genome}", suspect.local_name());
                log::warn!("{why}");
                rejected.push(why);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let game = assembly.game;
        let violations = validate(&game);
        if !violations.is_empty() {
            return Err(PipelineError::Invalid(violations));
        }
        let playthrough = match solve(&game) {
            OracleResult::Solvable(p) => p,
            OracleResult::Unsolvable(u) => return Err(PipelineError::Unsolvable(Box::new(u))),
        };
        let mut warnings = assembly.warnings;
        for o in &playthrough.unreached {
            warnings.push(format!("{} cannot be reached", o.id_str()));
        }
        let report = GenerationReport {
            victim: victim.clone(),
            graph_triples: graph.len(),
            pool_size: pool.len(),
            fitness: *fitness,
            suspects: genome.members().to_vec(),
            culprit,
            rejected,
            paths: genome
                .members()
                .iter()
                .zip(&planned)
                .map(|(s, (p, score))| PathReport {
                    suspect: s.clone(),
                    nodes: p.nodes.clone(),
                    score: *score,
                })
                .collect(),
            objects: ObjectCounts {
                cities: game.cities.len(),
                buildings: game.buildings.len(),
                npcs: game.npcs.len(),
                items: game.items.len(),
                clues: game.clues.len(),
                facts: game.facts.len(),
                locks: game.buildings.iter().filter(|b| b.locked_by.is_some()).count(),
                path_objects: assembly.path_objects,
            },
            solution_length: playthrough.actions.len(),
            warnings,
        };
        return Ok(Generated { game, report });
    }
    Err(PipelineError::NoPathFound { attempts: rejected })
}
