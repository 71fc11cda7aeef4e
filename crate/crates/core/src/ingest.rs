//! Populating a [`KnowledgeGraph`] from dump files or a SPARQL-protocol endpoint.
//!
//! Remote crawling is breadth-first from a seed entity. Each entity is fetched
//! with one describe query; responses are SPARQL TSV results whose cells are
//! N-Triples terms. Frontiers are processed in lexicographic IRI order so the
//! crawl result depends only on the responses, never on timing.

use std::cell::Cell;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use percent_encoding::{utf8_percent_encode, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::kg::{
    parse_ntriples, parse_term, EntityId, KindConfig, KnowledgeGraph, ParseError, Term, Triple, TripleObject,
};

/// Describe-entity query. `{iri}` and `{limit}` are substituted per request.
pub const DESCRIBE_QUERY_TEMPLATE: &str = "SELECT ?s ?p ?o WHERE { \
{ <{iri}> ?p ?o . BIND(<{iri}> AS ?s) } UNION { ?s ?p <{iri}> . BIND(<{iri}> AS ?o) } \
} ORDER BY ?s ?p ?o LIMIT {limit}";

const TSV_FORMAT: &str = "text/tab-separated-values";

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("request timed out")]
    Timeout,
    #[error("HTTP status {0}")]
    Status(u16),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
    #[error("invalid source configuration: {0}")]
    InvalidConfig(String),
    #[error("fetching {entity} failed after {attempts} attempt(s): {source}")]
    Network {
        entity: EntityId,
        attempts: u32,
        #[source]
        source: TransportError,
        partial: Box<CrawlResult>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteEndpoint {
    pub base_url: String,
    pub timeout: Duration,
    pub max_retries: u32,
    pub politeness_delay: Duration,
}

impl RemoteEndpoint {
    pub fn new(
        base_url: impl Into<String>,
        timeout: Duration,
        max_retries: u32,
        politeness_delay: Duration,
    ) -> Result<Self, IngestError> {
        if timeout.is_zero() {
            return Err(IngestError::InvalidConfig("timeout must be positive".into()));
        }
        Ok(RemoteEndpoint {
            base_url: base_url.into(),
            timeout,
            max_retries,
            politeness_delay,
        })
    }

    /// Full GET URL for a describe request.
    pub fn describe_url(&self, entity: &EntityId, limit: usize) -> String {
        let query = DESCRIBE_QUERY_TEMPLATE
            .replace("{iri}", entity.as_str())
            .replace("{limit}", &limit.to_string());
        let sep = if self.base_url.contains('?') { '&' } else { '?' };
        format!(
            "{}{}query={}&format={}",
            self.base_url,
            sep,
            utf8_percent_encode(&query, NON_ALPHANUMERIC),
            utf8_percent_encode(TSV_FORMAT, NON_ALPHANUMERIC)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    LocalDump(PathBuf),
    RemoteEndpoint(RemoteEndpoint),
}

impl DataSource {
    /// `http(s)://` strings become remote endpoints with default settings,
    /// anything else a dump path.
    pub fn parse(spec: &str) -> Result<Self, IngestError> {
        if spec.starts_with("http://") || spec.starts_with("https://") {
            Ok(DataSource::RemoteEndpoint(RemoteEndpoint::new(
                spec,
                Duration::from_secs(30),
                3,
                Duration::from_millis(500),
            )?))
        } else {
            Ok(DataSource::LocalDump(PathBuf::from(spec)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchBudget {
    pub max_entities: usize,
    /// Hop 0 is the seed itself.
    pub max_hops: usize,
    pub max_triples_per_entity: usize,
}

impl FetchBudget {
    pub fn new(max_entities: usize, max_hops: usize, max_triples_per_entity: usize) -> Result<Self, IngestError> {
        if max_entities == 0 || max_triples_per_entity == 0 {
            return Err(IngestError::InvalidConfig(
                "entity and per-entity triple budgets must be positive".into(),
            ));
        }
        Ok(FetchBudget {
            max_entities,
            max_hops,
            max_triples_per_entity,
        })
    }
}

impl Default for FetchBudget {
    fn default() -> Self {
        FetchBudget {
            max_entities: 2_000,
            max_hops: 2,
            max_triples_per_entity: 500,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TruncationReport {
    pub entities_fetched: usize,
    /// Hops whose frontier was fully fetched.
    pub hops_completed: usize,
    /// Entities left unfetched because the entity budget ran out.
    pub entities_dropped: usize,
    /// Entities whose triples were cut at the per-entity budget.
    pub triples_truncated: Vec<EntityId>,
    /// Response lines that could not be parsed, with the reason.
    pub skipped_lines: Vec<String>,
}

impl TruncationReport {
    pub fn truncated(&self) -> bool {
        self.entities_dropped > 0 || !self.triples_truncated.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct CrawlResult {
    pub graph: KnowledgeGraph,
    pub report: TruncationReport,
}

pub trait Transport {
    fn get(&self, url: &str, timeout: Duration) -> Result<String, TransportError>;
}

pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new() -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(concat!("mystery-core/", env!("CARGO_PKG_VERSION")))
            .build()
            .map_err(|e| TransportError::Other(e.to_string()))?;
        Ok(HttpTransport { client })
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str, timeout: Duration) -> Result<String, TransportError> {
        let resp = self
            .client
            .get(url)
            .header("Accept", TSV_FORMAT)
            .timeout(timeout)
            .send()
            .map_err(|e| {
                if e.is_timeout() {
                    TransportError::Timeout
                } else {
                    TransportError::Other(e.to_string())
                }
            })?;
        let status = resp.status();
        if !status.is_success() {
            return Err(TransportError::Status(status.as_u16()));
        }
        resp.text().map_err(|e| TransportError::Other(e.to_string()))
    }
}

/// Time source for politeness delays; injectable for tests.
pub trait Clock {
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

pub struct SystemClock {
    start: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock { start: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.start.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d)
    }
}

/// Reads a dump file into a graph.
pub fn load_dump(path: &Path, kinds: KindConfig) -> Result<KnowledgeGraph, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let triples = parse_ntriples(&text).map_err(|source| IngestError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    Ok(KnowledgeGraph::from_triples(kinds, triples))
}

#[derive(Debug, Default)]
pub struct Described {
    pub triples: Vec<Triple>,
    pub skipped: Vec<String>,
}

/// One "describe this entity" lookup: every triple with the entity as
/// subject or object.
pub trait Describer {
    fn describe(&mut self, entity: &EntityId, limit: usize) -> Result<Described, (u32, TransportError)>;
}

/// Describes entities from an already-loaded graph.
pub struct GraphDescriber<'a> {
    graph: &'a KnowledgeGraph,
}

impl<'a> GraphDescriber<'a> {
    pub fn new(graph: &'a KnowledgeGraph) -> Self {
        GraphDescriber { graph }
    }
}

impl Describer for GraphDescriber<'_> {
    fn describe(&mut self, entity: &EntityId, _limit: usize) -> Result<Described, (u32, TransportError)> {
        let target = TripleObject::Entity(entity.clone());
        let triples = self
            .graph
            .triples()
            .filter(|t| t.subject == *entity || t.object == target)
            .cloned()
            .collect();
        Ok(Described {
            triples,
            skipped: Vec::new(),
        })
    }
}

/// Describes entities through a remote endpoint, with an optional on-disk
/// cache keyed by the SHA-256 of the request URL.
pub struct RemoteDescriber<T: Transport, C: Clock> {
    endpoint: RemoteEndpoint,
    transport: T,
    clock: C,
    cache_dir: Option<PathBuf>,
    last_request: Cell<Option<Duration>>,
}

impl<T: Transport, C: Clock> RemoteDescriber<T, C> {
    pub fn new(endpoint: RemoteEndpoint, transport: T, clock: C, cache_dir: Option<PathBuf>) -> Self {
        RemoteDescriber {
            endpoint,
            transport,
            clock,
            cache_dir,
            last_request: Cell::new(None),
        }
    }

    fn cache_path(&self, url: &str) -> Option<PathBuf> {
        let dir = self.cache_dir.as_ref()?;
        let digest = Sha256::digest(url.as_bytes());
        Some(dir.join(format!("{}.tsv", hex::encode(digest))))
    }

    fn polite_get(&self, url: &str) -> Result<String, TransportError> {
        if let Some(last) = self.last_request.get() {
            let elapsed = self.clock.now().saturating_sub(last);
            if elapsed < self.endpoint.politeness_delay {
                self.clock.sleep(self.endpoint.politeness_delay - elapsed);
            }
        }
        self.last_request.set(Some(self.clock.now()));
        self.transport.get(url, self.endpoint.timeout)
    }

    fn fetch(&self, url: &str) -> Result<String, (u32, TransportError)> {
        if let Some(path) = self.cache_path(url) {
            if let Ok(body) = std::fs::read_to_string(&path) {
                return Ok(body);
            }
        }
        let mut attempts = 0;
        let body = loop {
            attempts += 1;
            match self.polite_get(url) {
                Ok(body) => break body,
                Err(e) if attempts > self.endpoint.max_retries => return Err((attempts, e)),
                Err(e) => log::warn!("request failed (attempt {attempts}): {e}"),
            }
        };
        if let Some(path) = self.cache_path(url) {
            let written = path
                .parent()
                .map_or(Ok(()), std::fs::create_dir_all)
                .and_then(|_| std::fs::write(&path, &body));
            if let Err(e) = written {
                log::warn!("could not write cache file {}: {e}", path.display());
            }
        }
        Ok(body)
    }
}

impl<T: Transport, C: Clock> Describer for RemoteDescriber<T, C> {
    fn describe(&mut self, entity: &EntityId, limit: usize) -> Result<Described, (u32, TransportError)> {
        let url = self.endpoint.describe_url(entity, limit);
        let body = self.fetch(&url)?;
        Ok(parse_tsv_response(entity, &body))
    }
}

/// Parses SPARQL TSV results with `?s ?p ?o` columns. Rows that do not parse,
/// or that do not mention `entity`, are skipped and recorded.
pub fn parse_tsv_response(entity: &EntityId, body: &str) -> Described {
    let mut out = Described::default();
    for (idx, line) in body.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || (idx == 0 && line.starts_with('?')) {
            continue;
        }
        let row = || -> Result<Triple, String> {
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != 3 {
                return Err(format!("expected 3 columns, found {}", cells.len()));
            }
            let s = match parse_term(cells[0])? {
                Term::Iri(i) => EntityId::new(i).map_err(|e| e.to_string())?,
                Term::Literal(_) => return Err("literal subject".into()),
            };
            let p = match parse_term(cells[1])? {
                Term::Iri(i) => i,
                Term::Literal(_) => return Err("literal predicate".into()),
            };
            let o = match parse_term(cells[2])? {
                Term::Iri(i) => TripleObject::Entity(EntityId::new(i).map_err(|e| e.to_string())?),
                Term::Literal(l) => TripleObject::Literal(l),
            };
            let t = Triple::new(s, p, o).map_err(|e| e.to_string())?;
            if t.subject != *entity && t.object.as_entity() != Some(entity) {
                return Err("row does not mention the described entity".into());
            }
            Ok(t)
        };
        match row() {
            Ok(t) => out.triples.push(t),
            Err(reason) => out.skipped.push(format!("{entity} line {}: {reason}", idx + 1)),
        }
    }
    out
}

/// Breadth-first crawl from `seed`, bounded by `budget`.
///
/// Each frontier is visited in lexicographic order and each entity's triples
/// are sorted before truncation, so the result is a function of the
/// describer's answers alone. On a transport failure the error carries the
/// graph built so far.
pub fn crawl(
    describer: &mut dyn Describer,
    kinds: KindConfig,
    seed: &EntityId,
    budget: FetchBudget,
) -> Result<CrawlResult, IngestError> {
    let mut graph = KnowledgeGraph::with_kinds(kinds);
    let mut report = TruncationReport::default();
    let mut visited: BTreeSet<EntityId> = BTreeSet::from([seed.clone()]);
    let mut frontier: BTreeSet<EntityId> = BTreeSet::from([seed.clone()]);

    'hops: for hop in 0..=budget.max_hops {
        let mut next = BTreeSet::new();
        let mut iter = frontier.iter();
        for entity in iter.by_ref() {
            if report.entities_fetched == budget.max_entities {
                report.entities_dropped += 1;
                break;
            }
            let described = match describer.describe(entity, budget.max_triples_per_entity) {
                Ok(d) => d,
                Err((attempts, source)) => {
                    return Err(IngestError::Network {
                        entity: entity.clone(),
                        attempts,
                        source,
                        partial: Box::new(CrawlResult { graph, report }),
                    })
                }
            };
            report.entities_fetched += 1;
            report.skipped_lines.extend(described.skipped);
            let mut triples = described.triples;
            triples.sort();
            triples.dedup();
            if triples.len() > budget.max_triples_per_entity {
                triples.truncate(budget.max_triples_per_entity);
                report.triples_truncated.push(entity.clone());
            }
            for t in triples {
                if hop < budget.max_hops && graph.is_link_predicate(&t.predicate) {
                    let other = if t.subject == *entity {
                        t.object.as_entity().cloned()
                    } else {
                        Some(t.subject.clone())
                    };
                    if let Some(o) = other.filter(|o| !visited.contains(o)) {
                        next.insert(o);
                    }
                }
                graph.add_triple(t);
            }
        }
        let remaining = iter.count();
        if report.entities_dropped > 0 || remaining > 0 {
            report.entities_dropped += remaining + next.len();
            break 'hops;
        }
        report.hops_completed = hop + 1;
        visited.extend(next.iter().cloned());
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ok(CrawlResult { graph, report })
}

/// Builds a graph around `seed` from either kind of source.
pub fn fetch_neighborhood(
    source: &DataSource,
    kinds: KindConfig,
    seed: &EntityId,
    budget: FetchBudget,
    cache_dir: Option<PathBuf>,
) -> Result<CrawlResult, IngestError> {
    match source {
        DataSource::LocalDump(path) => {
            let full = load_dump(path, kinds.clone())?;
            crawl(&mut GraphDescriber::new(&full), kinds, seed, budget)
        }
        DataSource::RemoteEndpoint(endpoint) => {
            let transport = HttpTransport::new().map_err(|e| IngestError::InvalidConfig(e.to_string()))?;
            let mut describer = RemoteDescriber::new(endpoint.clone(), transport, SystemClock::default(), cache_dir);
            crawl(&mut describer, kinds, seed, budget)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;
    use std::collections::HashMap;
    use std::rc::Rc;

    const P: &str = "http://ex.org/knows";

    fn e(s: &str) -> EntityId {
        EntityId::new(format!("http://ex.org/{s}")).unwrap()
    }

    fn star_graph() -> KnowledgeGraph {
        // hub -- s1..s3, s1 -- far
        let mut g = KnowledgeGraph::new();
        for s in ["s1", "s2", "s3"] {
            g.add_triple(Triple::new(e("hub"), P, TripleObject::Entity(e(s))).unwrap());
        }
        g.add_triple(Triple::new(e("s1"), P, TripleObject::Entity(e("far"))).unwrap());
        g.add_triple(Triple::new(e("hub"), "http://ex.org/name", TripleObject::literal("Hub")).unwrap());
        g
    }

    #[test]
    fn zero_hops_keeps_only_seed_triples() {
        let g = star_graph();
        let r = crawl(
            &mut GraphDescriber::new(&g),
            KindConfig::default(),
            &e("hub"),
            FetchBudget::new(10, 0, 10).unwrap(),
        )
        .unwrap();
        assert_eq!(r.graph.len(), 4);
        assert!(r.graph.triples().all(|t| t.subject == e("hub")));
        assert!(!r.report.truncated());
    }

    #[test]
    fn entity_budget_of_one_reports_truncation() {
        let g = star_graph();
        let r = crawl(
            &mut GraphDescriber::new(&g),
            KindConfig::default(),
            &e("hub"),
            FetchBudget::new(1, 2, 10).unwrap(),
        )
        .unwrap();
        assert_eq!(r.report.entities_fetched, 1);
        assert!(r.report.truncated());
        assert_eq!(r.report.entities_dropped, 3);
    }

    #[test]
    fn per_entity_triple_budget_truncates_deterministically() {
        let g = star_graph();
        let r = crawl(
            &mut GraphDescriber::new(&g),
            KindConfig::default(),
            &e("hub"),
            FetchBudget::new(10, 0, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(r.graph.len(), 2);
        assert_eq!(r.report.triples_truncated, vec![e("hub")]);
        // Lexicographically first two triples of the hub.
        let objs: Vec<_> = r.graph.triples().map(|t| t.object.clone()).collect();
        assert_eq!(objs, vec![TripleObject::Entity(e("s1")), TripleObject::Entity(e("s2"))]);
    }

    #[test]
    fn budget_validation() {
        assert!(FetchBudget::new(0, 1, 1).is_err());
        assert!(FetchBudget::new(1, 0, 0).is_err());
        assert!(RemoteEndpoint::new("http://x", Duration::ZERO, 0, Duration::ZERO).is_err());
    }

    #[derive(Clone, Default)]
    struct FakeClock {
        now: Rc<Cell<Duration>>,
        sleeps: Rc<RefCell<Vec<Duration>>>,
    }

    impl Clock for FakeClock {
        fn now(&self) -> Duration {
            self.now.get()
        }
        fn sleep(&self, d: Duration) {
            self.sleeps.borrow_mut().push(d);
            self.now.set(self.now.get() + d);
        }
    }

    struct ReplayTransport {
        clock: FakeClock,
        responses: HashMap<String, Result<String, u16>>,
        request_times: RefCell<Vec<Duration>>,
        failures_left: Cell<u32>,
    }

    impl Transport for ReplayTransport {
        fn get(&self, url: &str, _timeout: Duration) -> Result<String, TransportError> {
            self.request_times.borrow_mut().push(self.clock.now());
            // each request takes 10ms of fake time
            self.clock.now.set(self.clock.now.get() + Duration::from_millis(10));
            if self.failures_left.get() > 0 {
                self.failures_left.set(self.failures_left.get() - 1);
                return Err(TransportError::Status(503));
            }
            match self.responses.get(url) {
                Some(Ok(body)) => Ok(body.clone()),
                Some(Err(code)) => Err(TransportError::Status(*code)),
                None => Ok("?s\t?p\t?o\n".into()),
            }
        }
    }

    fn endpoint(retries: u32) -> RemoteEndpoint {
        RemoteEndpoint::new(
            "http://mock.local/sparql",
            Duration::from_secs(1),
            retries,
            Duration::from_millis(100),
        )
        .unwrap()
    }

    fn tsv_for(g: &KnowledgeGraph, entity: &EntityId) -> String {
        let mut body = String::from("?s\t?p\t?o\n");
        let d = GraphDescriber::new(g).describe(entity, 100).unwrap();
        for t in d.triples {
            let mut o = String::new();
            crate::kg::write_object(&t.object, &mut o);
            body.push_str(&format!("<{}>\t<{}>\t{}\n", t.subject, t.predicate, o));
        }
        body
    }

    fn replay(g: &KnowledgeGraph, retries: u32, failures: u32) -> (ReplayTransport, FakeClock) {
        let clock = FakeClock::default();
        let ep = endpoint(retries);
        let mut responses = HashMap::new();
        for ent in ["hub", "s1", "s2", "s3", "far"] {
            responses.insert(ep.describe_url(&e(ent), 50), Ok(tsv_for(g, &e(ent))));
        }
        (
            ReplayTransport {
                clock: clock.clone(),
                responses,
                request_times: RefCell::new(Vec::new()),
                failures_left: Cell::new(failures),
            },
            clock,
        )
    }

    #[test]
    fn mock_endpoint_star_crawl_yields_hub_and_spokes() {
        let g = star_graph();
        let (transport, clock) = replay(&g, 0, 0);
        let mut d = RemoteDescriber::new(endpoint(0), transport, clock.clone(), None);
        let r = crawl(
            &mut d,
            KindConfig::default(),
            &e("hub"),
            FetchBudget::new(50, 1, 50).unwrap(),
        )
        .unwrap();
        let subjects: BTreeSet<_> = r.graph.triples().map(|t| t.subject.clone()).collect();
        assert_eq!(subjects, [e("hub"), e("s1")].into_iter().collect());
        assert_eq!(r.report.entities_fetched, 4);
        assert_eq!(r.graph.neighbors(&e("hub")).len(), 3);
        // s1's outgoing edge to `far` was fetched while describing s1.
        assert!(r.graph.neighbors(&e("s1")).contains(&e("far")));

        // politeness: consecutive requests at least 100ms apart
        let times = d.transport.request_times.borrow().clone();
        assert_eq!(times.len(), 4);
        for w in times.windows(2) {
            assert!(w[1] - w[0] >= Duration::from_millis(100), "{:?}", w);
        }
    }

    #[test]
    fn crawl_is_identical_for_local_and_remote_sources() {
        let g = star_graph();
        let (transport, clock) = replay(&g, 0, 0);
        let mut remote = RemoteDescriber::new(endpoint(0), transport, clock, None);
        let budget = FetchBudget::new(50, 2, 50).unwrap();
        let a = crawl(&mut remote, KindConfig::default(), &e("hub"), budget).unwrap();
        let b = crawl(&mut GraphDescriber::new(&g), KindConfig::default(), &e("hub"), budget).unwrap();
        assert_eq!(
            a.graph.triples().collect::<Vec<_>>(),
            b.graph.triples().collect::<Vec<_>>()
        );
        assert_eq!(a.report, b.report);
    }

    #[test]
    fn retries_then_succeeds() {
        let g = star_graph();
        let (transport, clock) = replay(&g, 2, 2);
        let mut d = RemoteDescriber::new(endpoint(2), transport, clock, None);
        let r = crawl(
            &mut d,
            KindConfig::default(),
            &e("hub"),
            FetchBudget::new(50, 0, 50).unwrap(),
        )
        .unwrap();
        assert_eq!(r.graph.len(), 4);
    }

    #[test]
    fn network_failure_carries_partial_progress() {
        let g = star_graph();
        let (mut transport, clock) = replay(&g, 1, 0);
        transport
            .responses
            .insert(endpoint(1).describe_url(&e("s2"), 50), Err(500));
        let mut d = RemoteDescriber::new(endpoint(1), transport, clock, None);
        let err = crawl(
            &mut d,
            KindConfig::default(),
            &e("hub"),
            FetchBudget::new(50, 1, 50).unwrap(),
        )
        .unwrap_err();
        match err {
            IngestError::Network {
                entity,
                attempts,
                partial,
                ..
            } => {
                assert_eq!(entity, e("s2"));
                assert_eq!(attempts, 2);
                assert_eq!(partial.report.entities_fetched, 2);
                assert!(partial.graph.len() >= 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_rows_are_skipped_and_recorded() {
        let body = "?s\t?p\t?o\n<http://ex.org/hub>\t<http://ex.org/p>\t\"ok\"\nnot a row\n<http://ex.org/x>\t<http://ex.org/p>\t\"unrelated\"\n";
        let d = parse_tsv_response(&e("hub"), body);
        assert_eq!(d.triples.len(), 1);
        assert_eq!(d.skipped.len(), 2);
        assert!(d.skipped[0].contains("line 3"));
    }

    #[test]
    fn cache_makes_second_crawl_offline() {
        let dir = tempfile::tempdir().unwrap();
        let g = star_graph();
        let budget = FetchBudget::new(50, 1, 50).unwrap();
        let (transport, clock) = replay(&g, 0, 0);
        let mut d = RemoteDescriber::new(endpoint(0), transport, clock, Some(dir.path().to_path_buf()));
        let first = crawl(&mut d, KindConfig::default(), &e("hub"), budget).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 4);

        // A transport that always fails: everything must come from the cache.
        let clock = FakeClock::default();
        let failing = ReplayTransport {
            clock: clock.clone(),
            responses: HashMap::new(),
            request_times: RefCell::new(Vec::new()),
            failures_left: Cell::new(u32::MAX),
        };
        let mut d = RemoteDescriber::new(endpoint(0), failing, clock, Some(dir.path().to_path_buf()));
        let second = crawl(&mut d, KindConfig::default(), &e("hub"), budget).unwrap();
        assert_eq!(
            first.graph.triples().collect::<Vec<_>>(),
            second.graph.triples().collect::<Vec<_>>()
        );
        assert!(d.transport.request_times.borrow().is_empty());
    }

    #[test]
    fn load_dump_dedups_and_reports_errors() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("empty.nt");
        std::fs::write(&empty, "").unwrap();
        assert!(load_dump(&empty, KindConfig::default()).unwrap().is_empty());

        let dup = dir.path().join("dup.nt");
        std::fs::write(
            &dup,
            "<http://ex.org/a> <http://ex.org/p> \"x\" .\n<http://ex.org/a> <http://ex.org/p> \"x\" .\n<http://ex.org/a> <http://ex.org/p> \"y\" .\n",
        )
        .unwrap();
        assert_eq!(load_dump(&dup, KindConfig::default()).unwrap().len(), 2);

        let bad = dir.path().join("bad.nt");
        std::fs::write(&bad, "<http://ex.org/a> <http://ex.org/p> \"x\" .\n<oops\n").unwrap();
        match load_dump(&bad, KindConfig::default()) {
            Err(IngestError::Parse { source, .. }) => assert_eq!(source.line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match load_dump(&dir.path().join("missing.nt"), KindConfig::default()) {
            Err(IngestError::Io { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
