//! Bounded simple-path search between the victim and each suspect, and
//! ranking of the candidate paths.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::{EntityId, EntityKind, KnowledgeGraph};

pub const DEFAULT_MAX_EDGES: usize = 4;
pub const DEFAULT_MAX_PATHS: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("no path of at most {max_edges} edges links the victim to {suspect}")]
    NoPathFound { suspect: EntityId, max_edges: usize },
}

/// A chain of linked entities from the victim (first) to a suspect (last).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArticlePath {
    pub nodes: Vec<EntityId>,
    pub edge_predicates: Vec<String>,
}

impl ArticlePath {
    pub fn len(&self) -> usize {
        self.edge_predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_predicates.is_empty()
    }

    pub fn source(&self) -> &EntityId {
        &self.nodes[0]
    }

    pub fn target(&self) -> &EntityId {
        self.nodes.last().expect("paths have at least two nodes")
    }

    /// Nodes strictly between the endpoints.
    pub fn interior(&self) -> &[EntityId] {
        &self.nodes[1..self.nodes.len() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathScore {
    /// Number of distinct entity kinds along the path.
    pub diversity: usize,
    /// Edge count.
    pub length: usize,
}

struct Search<'g> {
    graph: &'g KnowledgeGraph,
    adjacency: HashMap<EntityId, Vec<EntityId>>,
}

impl<'g> Search<'g> {
    fn neighbors(&mut self, e: &EntityId) -> &[EntityId] {
        let graph = self.graph;
        self.adjacency
            .entry(e.clone())
            .or_insert_with(|| graph.neighbors(e).into_iter().collect())
    }

    /// Hop distances from `from`, explored up to `limit` hops.
    fn distances(&mut self, from: &EntityId, limit: usize) -> HashMap<EntityId, usize> {
        let mut dist = HashMap::from([(from.clone(), 0)]);
        let mut queue = VecDeque::from([from.clone()]);
        while let Some(u) = queue.pop_front() {
            let d = dist[&u];
            if d == limit {
                continue;
            }
            for v in self.neighbors(&u).to_vec() {
                if !dist.contains_key(&v) {
                    dist.insert(v.clone(), d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// All simple paths of at most `max_edges` edges from `victim` to `suspect`,
/// shortest first and lexicographic by node sequence within a length, cut
/// off after `max_paths` results.
///
/// Edges are undirected. A path never passes through the suspect before its
/// end and never revisits a node.
pub fn find_paths(
    graph: &KnowledgeGraph,
    victim: &EntityId,
    suspect: &EntityId,
    max_edges: usize,
    max_paths: usize,
) -> Vec<ArticlePath> {
    let mut out: Vec<Vec<EntityId>> = Vec::new();
    if victim == suspect || max_paths == 0 {
        return Vec::new();
    }
    let mut search = Search {
        graph,
        adjacency: HashMap::new(),
    };
    let to_suspect = search.distances(suspect, max_edges);
    if !to_suspect.contains_key(victim) {
        return Vec::new();
    }

    // Iterative deepening yields the same order as a breadth-first search
    // with sorted expansion, without holding a whole frontier of partial paths.
    for length in to_suspect[victim]..=max_edges {
        let mut stack = vec![victim.clone()];
        let mut on_path: BTreeSet<EntityId> = BTreeSet::from([victim.clone()]);
        extend(
            &mut search,
            &to_suspect,
            suspect,
            length,
            max_paths,
            &mut stack,
            &mut on_path,
            &mut out,
        );
        if out.len() >= max_paths {
            break;
        }
    }
    out.into_iter()
        .map(|nodes| {
            let edge_predicates = nodes
                .windows(2)
                .map(|w| {
                    graph
                        .edge_predicate(&w[0], &w[1])
                        .expect("consecutive path nodes are adjacent")
                        .to_string()
                })
                .collect();
            ArticlePath { nodes, edge_predicates }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn extend(
    search: &mut Search<'_>,
    to_suspect: &HashMap<EntityId, usize>,
    suspect: &EntityId,
    length: usize,
    max_paths: usize,
    stack: &mut Vec<EntityId>,
    on_path: &mut BTreeSet<EntityId>,
    out: &mut Vec<Vec<EntityId>>,
) {
    let depth = stack.len() - 1;
    let here = stack[depth].clone();
    if depth == length {
        if here == *suspect {
            out.push(stack.clone());
        }
        return;
    }
    let remaining = length - depth - 1;
    for next in search.neighbors(&here).to_vec() {
        if out.len() >= max_paths {
            return;
        }
        if on_path.contains(&next) || (next == *suspect && remaining > 0) {
            continue;
        }
        match to_suspect.get(&next) {
            Some(&d) if d <= remaining => {}
            _ => continue,
        }
        stack.push(next.clone());
        on_path.insert(next.clone());
        extend(search, to_suspect, suspect, length, max_paths, stack, on_path, out);
        on_path.remove(&next);
        stack.pop();
    }
}

pub fn score_path(p: &ArticlePath, kind_of: impl Fn(&EntityId) -> EntityKind) -> PathScore {
    let kinds: BTreeSet<EntityKind> = p.nodes.iter().map(kind_of).collect();
    PathScore {
        diversity: kinds.len(),
        length: p.len(),
    }
}

/// Default preference: more kinds first, then longer, then the
/// lexicographically smaller node sequence. `Greater` means `a` is preferred.
pub fn path_preference(a: (&ArticlePath, PathScore), b: (&ArticlePath, PathScore)) -> Ordering {
    a.1.cmp(&b.1).then_with(|| b.0.nodes.cmp(&a.0.nodes))
}

pub fn select_best_path_by(
    paths: &[ArticlePath],
    graph: &KnowledgeGraph,
    preference: impl Fn((&ArticlePath, PathScore), (&ArticlePath, PathScore)) -> Ordering,
) -> Option<(ArticlePath, PathScore)> {
    paths
        .iter()
        .map(|p| (p, score_path(p, |e| graph.kind_of(e))))
        .max_by(|a, b| preference(*a, *b))
        .map(|(p, s)| (p.clone(), s))
}

pub fn select_best_path(paths: &[ArticlePath], graph: &KnowledgeGraph) -> Option<(ArticlePath, PathScore)> {
    select_best_path_by(paths, graph, path_preference)
}

/// Search and select in one step.
pub fn best_path(
    graph: &KnowledgeGraph,
    victim: &EntityId,
    suspect: &EntityId,
    max_edges: usize,
    max_paths: usize,
) -> Result<(ArticlePath, PathScore), PathError> {
    let paths = find_paths(graph, victim, suspect, max_edges, max_paths);
    select_best_path(&paths, graph).ok_or_else(|| PathError::NoPathFound {
        suspect: suspect.clone(),
        max_edges,
    })
}
