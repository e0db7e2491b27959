//! Construction of the monthly invocation graph from reply-pair records.
//!
//! The pipeline: aggregate raw reply pairs into a weighted digraph, drop
//! blacklisted and low-engagement domains, drop self-loops, then keep the
//! component reachable from a seed domain over edges of weight at least `W`
//! (treated as undirected). All surviving edges between kept nodes are
//! retained, including those below `W`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{IngestError, ReplyPairRecord};
use crate::month::Month;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("edge threshold must be at least 1")]
    InvalidEdgeThreshold,
    #[error("seed domain `{0}` is not present in the raw graph")]
    SeedMissing(String),
    #[error("seed domain `{0}` is blacklisted")]
    SeedBlacklisted(String),
    #[error("seed domain `{domain}` has engagement {engagement} below threshold {threshold}")]
    SeedBelowEngagement { domain: String, engagement: u64, threshold: u64 },
    #[error("seed domain `{domain}` has no incident edge of weight at least {edge_threshold}")]
    SeedIsolated { domain: String, edge_threshold: u64 },
    #[error("self-loop on `{0}` is not allowed")]
    SelfLoop(String),
    #[error("edge ({0},{1}) has zero weight")]
    ZeroWeight(String, String),
    #[error("edge endpoint `{0}` is not in the node set")]
    UnknownEndpoint(String),
    #[error("graph is not connected: component of size {reached} out of {total} nodes")]
    Disconnected { reached: usize, total: usize },
    #[error("graph file: {0}")]
    Ingest(#[from] IngestError),
    #[error("sidecar: {0}")]
    Sidecar(#[from] serde_json::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Aggregated reply-pair digraph for one month, before filtering.
/// Self-loops are permitted here.
#[derive(Debug, Clone)]
pub struct RawGraph {
    pub month: Month,
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<(String, String), u64>,
}

/// Filtering parameters for [`build_invocation_graph`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BuildConfig {
    /// Minimum political engagement for a domain to be kept (`p`).
    pub engagement_threshold: u64,
    /// Minimum edge weight followed during seed reachability (`W`).
    pub edge_threshold: u64,
    /// Domain the reachability search starts from.
    pub seed_domain: String,
    /// Social-media and content-hosting domains removed up front.
    pub blacklist: BTreeSet<String>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            engagement_threshold: 10_000,
            edge_threshold: 100,
            seed_domain: "nytimes.com".to_string(),
            blacklist: default_blacklist(),
        }
    }
}

/// Default block list of social-media and content-hosting domains.
pub fn default_blacklist() -> BTreeSet<String> {
    ["twitter.com", "facebook.com", "imgur.com", "bit.ly", "youtube.com", "instagram.com"]
        .into_iter()
        .map(str::to_string)
        .collect()
}

/// A validated invocation graph: weighted, directed, self-loop free, and
/// connected when edges are read as undirected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvocationGraph {
    month: Month,
    nodes: BTreeSet<String>,
    edges: BTreeMap<(String, String), u64>,
}

impl InvocationGraph {
    /// Validate and wrap a node and edge set. Rejects self-loops, zero
    /// weights, dangling endpoints, and disconnected node sets.
    pub fn new(
        month: Month,
        nodes: BTreeSet<String>,
        edges: BTreeMap<(String, String), u64>,
    ) -> Result<Self, BuildError> {
        for ((src, dst), weight) in &edges {
            if src == dst {
                return Err(BuildError::SelfLoop(src.clone()));
            }
            if *weight == 0 {
                return Err(BuildError::ZeroWeight(src.clone(), dst.clone()));
            }
            for endpoint in [src, dst] {
                if !nodes.contains(endpoint) {
                    return Err(BuildError::UnknownEndpoint(endpoint.clone()));
                }
            }
        }
        if !nodes.is_empty() {
            let start = nodes.iter().next().unwrap();
            let reached = undirected_reachable(&nodes, &edges, start, 1);
            if reached.len() != nodes.len() {
                return Err(BuildError::Disconnected {
                    reached: reached.len(),
                    total: nodes.len(),
                });
            }
        }
        Ok(InvocationGraph { month, nodes, edges })
    }

    pub fn month(&self) -> Month {
        self.month
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<(String, String), u64> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Weighted out-degree of a node.
    pub fn out_weight(&self, domain: &str) -> u64 {
        self.edges
            .iter()
            .filter(|((src, _), _)| src == domain)
            .map(|(_, w)| *w)
            .sum()
    }

    /// Weighted in-degree of a node.
    pub fn in_weight(&self, domain: &str) -> u64 {
        self.edges
            .iter()
            .filter(|((_, dst), _)| dst == domain)
            .map(|(_, w)| *w)
            .sum()
    }
}

fn undirected_reachable(
    nodes: &BTreeSet<String>,
    edges: &BTreeMap<(String, String), u64>,
    start: &str,
    min_weight: u64,
) -> BTreeSet<String> {
    let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for ((src, dst), weight) in edges {
        if *weight >= min_weight {
            adjacency.entry(src).or_default().push(dst);
            adjacency.entry(dst).or_default().push(src);
        }
    }
    let mut visited: BTreeSet<String> = BTreeSet::new();
    if !nodes.contains(start) {
        return visited;
    }
    let mut queue = VecDeque::new();
    visited.insert(start.to_string());
    queue.push_back(start.to_string());
    while let Some(current) = queue.pop_front() {
        if let Some(neighbors) = adjacency.get(current.as_str()) {
            for &next in neighbors {
                if !visited.contains(next) {
                    visited.insert(next.to_string());
                    queue.push_back(next.to_string());
                }
            }
        }
    }
    visited
}

/// Sum reply-pair counts into a weighted digraph for one month.
/// Self-loops survive this stage; they are removed during filtering.
pub fn aggregate_raw_graph(records: &[ReplyPairRecord], month: Month) -> RawGraph {
    let mut nodes = BTreeSet::new();
    let mut edges: BTreeMap<(String, String), u64> = BTreeMap::new();
    for record in records.iter().filter(|r| r.month == month) {
        nodes.insert(record.src_domain.clone());
        nodes.insert(record.dst_domain.clone());
        *edges
            .entry((record.src_domain.clone(), record.dst_domain.clone()))
            .or_insert(0) += record.count;
    }
    RawGraph { month, nodes, edges }
}

/// Apply the node filters and seed reachability to a raw graph.
///
/// Filter order: blacklist, engagement threshold, self-loop removal, then
/// reachability from the seed over edges of weight at least
/// `cfg.edge_threshold`, treating edges as undirected. Edges below the
/// threshold between two kept nodes are retained. A domain missing from
/// `engagement` counts as zero.
pub fn build_invocation_graph(
    raw: &RawGraph,
    engagement: &BTreeMap<String, u64>,
    cfg: &BuildConfig,
) -> Result<InvocationGraph, BuildError> {
    if cfg.edge_threshold == 0 {
        return Err(BuildError::InvalidEdgeThreshold);
    }
    let seed = &cfg.seed_domain;
    if !raw.nodes.contains(seed) {
        return Err(BuildError::SeedMissing(seed.clone()));
    }
    if cfg.blacklist.contains(seed) {
        return Err(BuildError::SeedBlacklisted(seed.clone()));
    }
    let seed_engagement = engagement.get(seed).copied().unwrap_or(0);
    if seed_engagement < cfg.engagement_threshold {
        return Err(BuildError::SeedBelowEngagement {
            domain: seed.clone(),
            engagement: seed_engagement,
            threshold: cfg.engagement_threshold,
        });
    }

    let kept = |domain: &str| {
        !cfg.blacklist.contains(domain)
            && engagement.get(domain).copied().unwrap_or(0) >= cfg.engagement_threshold
    };
    let surviving_nodes: BTreeSet<String> =
        raw.nodes.iter().filter(|n| kept(n)).cloned().collect();
    let surviving_edges: BTreeMap<(String, String), u64> = raw
        .edges
        .iter()
        .filter(|((src, dst), _)| src != dst && kept(src) && kept(dst))
        .map(|(k, w)| (k.clone(), *w))
        .collect();

    let reached = undirected_reachable(&surviving_nodes, &surviving_edges, seed, cfg.edge_threshold);
    if reached.len() <= 1 {
        return Err(BuildError::SeedIsolated {
            domain: seed.clone(),
            edge_threshold: cfg.edge_threshold,
        });
    }
    let final_edges: BTreeMap<(String, String), u64> = surviving_edges
        .into_iter()
        .filter(|((src, dst), _)| reached.contains(src) && reached.contains(dst))
        .collect();
    InvocationGraph::new(raw.month, reached, final_edges)
}

pub const EDGE_LIST_HEADER: &str = "src,dst,weight";

/// JSON sidecar stored next to an exported edge list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSidecar {
    pub month: Month,
    pub config: Option<BuildConfig>,
    pub nodes: Vec<String>,
}

pub fn write_edge_list<W: Write>(mut writer: W, graph: &InvocationGraph) -> std::io::Result<()> {
    writeln!(writer, "{EDGE_LIST_HEADER}")?;
    for ((src, dst), weight) in graph.edges() {
        writeln!(writer, "{src},{dst},{weight}")?;
    }
    Ok(())
}

pub fn write_sidecar<W: Write>(
    writer: W,
    graph: &InvocationGraph,
    config: Option<&BuildConfig>,
) -> Result<(), BuildError> {
    let sidecar = GraphSidecar {
        month: graph.month(),
        config: config.cloned(),
        nodes: graph.nodes().iter().cloned().collect(),
    };
    serde_json::to_writer_pretty(writer, &sidecar)?;
    Ok(())
}

/// Read a graph back from an edge-list CSV and its JSON sidecar, re-running
/// full validation.
pub fn read_invocation_graph<R1: Read, R2: Read>(
    edge_list: R1,
    sidecar: R2,
) -> Result<InvocationGraph, BuildError> {
    let sidecar: GraphSidecar = serde_json::from_reader(sidecar)?;
    let mut reader = csv::Reader::from_reader(edge_list);
    let got = reader
        .headers()
        .map_err(IngestError::from)?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if got != EDGE_LIST_HEADER {
        return Err(IngestError::BadHeader { expected: EDGE_LIST_HEADER, got }.into());
    }
    let mut edges = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(IngestError::from)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad_row = |msg: String| IngestError::BadRow { line, msg };
        let src = record.get(0).ok_or_else(|| bad_row("missing src".into()))?;
        let dst = record.get(1).ok_or_else(|| bad_row("missing dst".into()))?;
        let weight: u64 = record
            .get(2)
            .ok_or_else(|| bad_row("missing weight".into()))?
            .parse()
            .map_err(|_| bad_row("weight is not a non-negative integer".into()))?;
        edges.insert((src.to_string(), dst.to_string()), weight);
    }
    InvocationGraph::new(sidecar.month, sidecar.nodes.into_iter().collect(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn month(s: &str) -> Month {
        s.parse().unwrap()
    }

    fn record(m: &str, src: &str, dst: &str, count: u64) -> ReplyPairRecord {
        ReplyPairRecord {
            month: month(m),
            src_domain: src.to_string(),
            dst_domain: dst.to_string(),
            count,
        }
    }

    #[test]
    fn aggregate_single_edge() {
        let raw = aggregate_raw_graph(&[record("2016-01", "a.com", "b.com", 5)], month("2016-01"));
        assert_eq!(raw.edges[&("a.com".into(), "b.com".into())], 5);
        assert_eq!(raw.nodes.len(), 2);
    }

    #[test]
    fn aggregate_keeps_self_loops() {
        let records = [
            record("2016-01", "a.com", "a.com", 9),
            record("2016-01", "a.com", "b.com", 1),
        ];
        let raw = aggregate_raw_graph(&records, month("2016-01"));
        assert_eq!(raw.edges[&("a.com".into(), "a.com".into())], 9);
    }

    #[test]
    fn aggregate_filters_by_month() {
        let raw = aggregate_raw_graph(&[record("2016-02", "a.com", "b.com", 5)], month("2016-01"));
        assert!(raw.edges.is_empty());
        assert!(raw.nodes.is_empty());
    }

    fn engagement_all(raw: &RawGraph, value: u64) -> BTreeMap<String, u64> {
        raw.nodes.iter().map(|n| (n.clone(), value)).collect()
    }

    fn config(seed: &str, p: u64, w: u64) -> BuildConfig {
        BuildConfig {
            engagement_threshold: p,
            edge_threshold: w,
            seed_domain: seed.to_string(),
            blacklist: default_blacklist(),
        }
    }

    #[test]
    fn bfs_drops_weakly_attached_nodes() {
        // seed -> a at 150 crosses the threshold; a -> b at 50 does not, so b
        // is unreachable and the (a,b) edge goes with it.
        let records = [
            record("2016-01", "seed.com", "a.com", 150),
            record("2016-01", "a.com", "b.com", 50),
        ];
        let raw = aggregate_raw_graph(&records, month("2016-01"));
        let graph =
            build_invocation_graph(&raw, &engagement_all(&raw, 20_000), &config("seed.com", 10_000, 100))
                .unwrap();
        let nodes: Vec<_> = graph.nodes().iter().cloned().collect();
        assert_eq!(nodes, ["a.com", "seed.com"]);
        assert_eq!(graph.edge_count(), 1);
        assert!(graph.edges().contains_key(&("seed.com".into(), "a.com".into())));
    }

    #[test]
    fn engagement_threshold_excludes_nodes() {
        let records = [
            record("2016-01", "seed.com", "a.com", 150),
            record("2016-01", "b.com", "seed.com", 200),
        ];
        let raw = aggregate_raw_graph(&records, month("2016-01"));
        let mut engagement = engagement_all(&raw, 20_000);
        engagement.insert("b.com".into(), 9_999);
        let graph =
            build_invocation_graph(&raw, &engagement, &config("seed.com", 10_000, 100)).unwrap();
        let nodes: Vec<_> = graph.nodes().iter().cloned().collect();
        assert_eq!(nodes, ["a.com", "seed.com"]);
    }

    #[test]
    fn self_loops_never_survive() {
        let records = [
            record("2016-01", "seed.com", "seed.com", 1_000_000),
            record("2016-01", "seed.com", "a.com", 150),
        ];
        let raw = aggregate_raw_graph(&records, month("2016-01"));
        let graph =
            build_invocation_graph(&raw, &engagement_all(&raw, 20_000), &config("seed.com", 10_000, 100))
                .unwrap();
        assert!(!graph.edges().contains_key(&("seed.com".into(), "seed.com".into())));
        assert_eq!(graph.edge_count(), 1);
    }

    #[test]
    fn below_threshold_edges_between_kept_nodes_survive() {
        let records = [
            record("2016-01", "seed.com", "a.com", 150),
            record("2016-01", "a.com", "seed.com", 3),
        ];
        let raw = aggregate_raw_graph(&records, month("2016-01"));
        let graph =
            build_invocation_graph(&raw, &engagement_all(&raw, 20_000), &config("seed.com", 10_000, 100))
                .unwrap();
        assert_eq!(graph.edges()[&("a.com".into(), "seed.com".into())], 3);
    }

    #[test]
    fn build_errors_name_the_failed_seed_condition() {
        let records = [record("2016-01", "a.com", "b.com", 150)];
        let raw = aggregate_raw_graph(&records, month("2016-01"));
        let engagement = engagement_all(&raw, 20_000);

        assert!(matches!(
            build_invocation_graph(&raw, &engagement, &config("missing.com", 10_000, 100)),
            Err(BuildError::SeedMissing(_))
        ));

        let mut blacklisted = config("a.com", 10_000, 100);
        blacklisted.blacklist.insert("a.com".into());
        assert!(matches!(
            build_invocation_graph(&raw, &engagement, &blacklisted),
            Err(BuildError::SeedBlacklisted(_))
        ));

        assert!(matches!(
            build_invocation_graph(&raw, &BTreeMap::new(), &config("a.com", 10_000, 100)),
            Err(BuildError::SeedBelowEngagement { .. })
        ));

        assert!(matches!(
            build_invocation_graph(&raw, &engagement, &config("a.com", 10_000, 1_000)),
            Err(BuildError::SeedIsolated { .. })
        ));
    }

    #[test]
    fn validation_rejects_broken_graphs() {
        let m = month("2016-01");
        let nodes: BTreeSet<String> = ["a.com".to_string(), "b.com".to_string()].into();

        let self_loop: BTreeMap<(String, String), u64> =
            [(("a.com".into(), "a.com".into()), 1)].into();
        assert!(matches!(
            InvocationGraph::new(m, nodes.clone(), self_loop),
            Err(BuildError::SelfLoop(_))
        ));

        let dangling: BTreeMap<(String, String), u64> =
            [(("a.com".into(), "c.com".into()), 1)].into();
        assert!(matches!(
            InvocationGraph::new(m, nodes.clone(), dangling),
            Err(BuildError::UnknownEndpoint(_))
        ));

        assert!(matches!(
            InvocationGraph::new(m, nodes, BTreeMap::new()),
            Err(BuildError::Disconnected { .. })
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let records = [
            record("2016-01", "seed.com", "a.com", 150),
            record("2016-01", "a.com", "seed.com", 3),
        ];
        let raw = aggregate_raw_graph(&records, month("2016-01"));
        let cfg = config("seed.com", 10_000, 100);
        let graph = build_invocation_graph(&raw, &engagement_all(&raw, 20_000), &cfg).unwrap();

        let mut edge_csv = Vec::new();
        write_edge_list(&mut edge_csv, &graph).unwrap();
        let mut sidecar = Vec::new();
        write_sidecar(&mut sidecar, &graph, Some(&cfg)).unwrap();

        let reread = read_invocation_graph(edge_csv.as_slice(), sidecar.as_slice()).unwrap();
        assert_eq!(reread, graph);
    }

    prop_compose! {
        fn arbitrary_raw()(
            edges in proptest::collection::btree_map(
                (0usize..8, 0usize..8).prop_map(|(a, b)| (format!("d{a}.com"), format!("d{b}.com"))),
                1u64..400,
                1..24,
            )
        ) -> RawGraph {
            let mut nodes: BTreeSet<String> = BTreeSet::new();
            for (src, dst) in edges.keys() {
                nodes.insert(src.clone());
                nodes.insert(dst.clone());
            }
            nodes.insert("d0.com".to_string());
            RawGraph { month: "2016-01".parse().unwrap(), nodes, edges }
        }
    }

    proptest! {
        // Raising either threshold can only shrink the node set.
        #[test]
        fn thresholds_are_monotone(raw in arbitrary_raw(), p in 0u64..3, w in 1u64..300) {
            let engagement: BTreeMap<String, u64> = raw
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), i as u64))
                .collect();
            let base = config("d0.com", p, w);
            if let Ok(graph) = build_invocation_graph(&raw, &engagement, &base) {
                let mut tighter = base.clone();
                tighter.engagement_threshold = p + 1;
                tighter.edge_threshold = w + 50;
                // the seed itself may fall out, which only shrinks further
                if let Ok(smaller) = build_invocation_graph(&raw, &engagement, &tighter) {
                    prop_assert!(smaller.nodes().is_subset(graph.nodes()));
                }
            }
        }

        // Every kept node passes all filters and touches a strong edge.
        #[test]
        fn kept_nodes_satisfy_all_conditions(raw in arbitrary_raw(), w in 1u64..300) {
            let engagement: BTreeMap<String, u64> = raw
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| (n.clone(), (i % 3) as u64))
                .collect();
            let mut cfg = config("d0.com", 1, w);
            cfg.blacklist.insert("d3.com".to_string());
            if let Ok(graph) = build_invocation_graph(&raw, &engagement, &cfg) {
                for node in graph.nodes() {
                    prop_assert!(!cfg.blacklist.contains(node));
                    prop_assert!(engagement[node] >= cfg.engagement_threshold);
                    let strong_edge = graph.edges().iter().any(|((src, dst), &weight)| {
                        weight >= cfg.edge_threshold && (src == node || dst == node)
                    });
                    prop_assert!(strong_edge, "{node} has no kept edge of weight >= {w}");
                    prop_assert!(!graph.edges().contains_key(&(node.clone(), node.clone())));
                }
            }
        }

        // Output must not depend on record order.
        #[test]
        fn build_is_deterministic(raw in arbitrary_raw(), seed in 0u64..100) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut records: Vec<ReplyPairRecord> = raw
                .edges
                .iter()
                .map(|((src, dst), w)| record("2016-01", src, dst, *w))
                .collect();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            records.shuffle(&mut rng);

            let engagement = engagement_all(&raw, 10);
            let cfg = config("d0.com", 1, 2);
            let a = build_invocation_graph(&aggregate_raw_graph(&records, raw.month), &engagement, &cfg);
            let b = build_invocation_graph(&raw, &engagement, &cfg);
            match (a, b) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
                (Err(_), Err(_)) => {}
                other => prop_assert!(false, "one order built, the other failed: {:?}", other.0.is_ok()),
            }
        }
    }
}
