//! Degree-preserving null models and permutation baselines.
//!
//! Rewiring expands every weighted edge into unit stubs and matches
//! out-stubs to in-stubs uniformly at random, so each node keeps its exact
//! weighted in- and out-degree while everything else is randomized.
//! Self-loops can appear in the rewired graph; they are kept.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::align::{self, AlignError};
use crate::embedmetrics::{
    crossing_values, distinct_breakpoints, CrossingProfile, CrossingValues, MetricsError,
    WeightMode,
};
use crate::graphbuild::InvocationGraph;
use crate::ingest::RedditComment;
use crate::month::Month;
use crate::spectrum::Spectrum;

#[derive(Debug, Error)]
pub enum NullModelError {
    #[error("graph has no edges; the rewiring expectation is undefined")]
    ZeroTotalWeight,
    #[error("the closed-form expectation applies to weight mode only; use Monte Carlo for counts")]
    AnalyticCountMode,
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Align(#[from] AlignError),
}

/// A degree-preserving randomization of an invocation graph. Unlike the
/// source graph, self-loops may be present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewiredGraph {
    pub month: Month,
    pub nodes: Vec<String>,
    pub edges: BTreeMap<(String, String), u64>,
    pub rng_seed: u64,
}

impl RewiredGraph {
    pub fn out_weight(&self, domain: &str) -> u64 {
        self.edges.iter().filter(|((s, _), _)| s == domain).map(|(_, w)| *w).sum()
    }

    pub fn in_weight(&self, domain: &str) -> u64 {
        self.edges.iter().filter(|((_, d), _)| d == domain).map(|(_, w)| *w).sum()
    }
}

/// Mix a base seed with a stream index so parallel trials draw independent
/// sequences (splitmix64 finalizer).
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct StubLists {
    names: Vec<String>,
    /// one entry per unit of out-weight, in lexicographic node order
    out_stubs: Vec<u32>,
    /// one entry per unit of in-weight, in lexicographic node order
    in_stubs: Vec<u32>,
}

fn stub_lists(graph: &InvocationGraph) -> StubLists {
    let names: Vec<String> = graph.nodes().iter().cloned().collect();
    let index: BTreeMap<&str, u32> =
        names.iter().enumerate().map(|(i, n)| (n.as_str(), i as u32)).collect();
    let mut out_degree = vec![0u64; names.len()];
    let mut in_degree = vec![0u64; names.len()];
    for ((src, dst), &weight) in graph.edges() {
        out_degree[index[src.as_str()] as usize] += weight;
        in_degree[index[dst.as_str()] as usize] += weight;
    }
    let expand = |degrees: &[u64]| {
        let mut stubs = Vec::with_capacity(degrees.iter().sum::<u64>() as usize);
        for (node, &degree) in degrees.iter().enumerate() {
            stubs.extend(std::iter::repeat_n(node as u32, degree as usize));
        }
        stubs
    };
    StubLists { out_stubs: expand(&out_degree), in_stubs: expand(&in_degree), names }
}

fn matched_edges(
    stubs: &StubLists,
    rng: &mut ChaCha8Rng,
    shuffled_in: &mut Vec<u32>,
) -> BTreeMap<(u32, u32), u64> {
    shuffled_in.clear();
    shuffled_in.extend_from_slice(&stubs.in_stubs);
    shuffled_in.shuffle(rng);
    let mut edges: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (&src, &dst) in stubs.out_stubs.iter().zip(shuffled_in.iter()) {
        *edges.entry((src, dst)).or_insert(0) += 1;
    }
    edges
}

/// Uniformly random degree-preserving rewiring. Deterministic for a given
/// input and seed.
pub fn rewire(graph: &InvocationGraph, rng_seed: u64) -> RewiredGraph {
    let stubs = stub_lists(graph);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut scratch = Vec::new();
    let indexed = matched_edges(&stubs, &mut rng, &mut scratch);
    let edges = indexed
        .into_iter()
        .map(|((s, d), w)| ((stubs.names[s as usize].clone(), stubs.names[d as usize].clone()), w))
        .collect();
    RewiredGraph { month: graph.month(), nodes: stubs.names, edges, rng_seed }
}

/// How to obtain the crossing profile expected under rewiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullMethod {
    /// Closed form from uniform stub matching; weight mode only.
    Analytic,
    /// Empirical mean over independent rewirings.
    MonteCarlo { trials: usize, rng_seed: u64 },
}

/// Monte Carlo standard errors of a crossing estimate, one per interval and
/// one per breakpoint, for each direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingStdErr {
    pub interval_right: Vec<f64>,
    pub interval_left: Vec<f64>,
    pub at_right: Vec<f64>,
    pub at_left: Vec<f64>,
}

/// Expected crossing profile under rewiring, with standard errors when
/// estimated by Monte Carlo.
#[derive(Debug, Clone, PartialEq)]
pub struct NullCrossing {
    pub profile: CrossingProfile,
    /// `None` for the closed form.
    pub std_err: Option<CrossingStdErr>,
    pub trials: usize,
}

/// Crossing profile expected under degree-preserving rewiring.
///
/// In weight mode the expectation has a closed form: for `y` between scores,
/// the expected rightward mass is (out-weight left of `y`) times (in-weight
/// right of `y`) divided by total weight, by linearity over uniformly
/// matched stubs. Count mode has no such form and requires Monte Carlo.
pub fn expected_crossing(
    graph: &InvocationGraph,
    spectrum: &Spectrum,
    mode: WeightMode,
    method: NullMethod,
) -> Result<NullCrossing, NullModelError> {
    let total_weight = graph.total_weight();
    if total_weight == 0 {
        return Err(NullModelError::ZeroTotalWeight);
    }
    let scores: BTreeMap<&str, f64> = graph
        .nodes()
        .iter()
        .map(|n| {
            spectrum
                .score(n)
                .map(|s| (n.as_str(), s))
                .ok_or_else(|| MetricsError::MissingScore(n.clone()))
        })
        .collect::<Result<_, _>>()?;
    let breakpoints = distinct_breakpoints(&scores);

    match method {
        NullMethod::Analytic => {
            if mode != WeightMode::Weight {
                return Err(NullModelError::AnalyticCountMode);
            }
            // out- and in-weight lumped per breakpoint, in score order
            let mut out_at = vec![0.0; breakpoints.len()];
            let mut in_at = vec![0.0; breakpoints.len()];
            for node in graph.nodes() {
                let position = breakpoints.partition_point(|&b| b < scores[node.as_str()]);
                out_at[position] += graph.out_weight(node) as f64;
                in_at[position] += graph.in_weight(node) as f64;
            }
            let total = total_weight as f64;
            let out_total: f64 = out_at.iter().sum();
            let in_total: f64 = in_at.iter().sum();
            let n_breakpoints = breakpoints.len();
            let n_intervals = n_breakpoints.saturating_sub(1);
            // an out-stub left of y pairs with an in-stub right of y with
            // probability (in-weight right of y) / total
            let mut values = CrossingValues {
                interval_right: Vec::with_capacity(n_intervals),
                interval_left: Vec::with_capacity(n_intervals),
                at_right: Vec::with_capacity(n_breakpoints),
                at_left: Vec::with_capacity(n_breakpoints),
            };
            let mut out_upto = 0.0; // out-weight at scores <= current breakpoint
            let mut in_upto = 0.0;
            for i in 0..n_breakpoints {
                // strictly below / strictly above the breakpoint itself
                let out_below = out_upto;
                let in_below = in_upto;
                let out_above = out_total - out_upto - out_at[i];
                let in_above = in_total - in_upto - in_at[i];
                values.at_right.push(out_below * in_above / total);
                values.at_left.push(out_above * in_below / total);
                out_upto += out_at[i];
                in_upto += in_at[i];
                if i + 1 < n_breakpoints {
                    // open interval (b_i, b_{i+1})
                    values.interval_right.push(out_upto * (in_total - in_upto) / total);
                    values.interval_left.push((out_total - out_upto) * in_upto / total);
                }
            }
            Ok(NullCrossing {
                profile: CrossingProfile::from_parts(breakpoints, values, mode),
                std_err: None,
                trials: 0,
            })
        }
        NullMethod::MonteCarlo { trials, rng_seed } => {
            if trials == 0 {
                return Err(NullModelError::ZeroTrials);
            }
            let stubs = stub_lists(graph);
            let named: BTreeMap<&str, f64> =
                stubs.names.iter().map(|n| (n.as_str(), scores[n.as_str()])).collect();
            let n_breakpoints = breakpoints.len();
            let n_intervals = n_breakpoints.saturating_sub(1);
            let mut acc = [
                Accumulator::new(n_intervals),
                Accumulator::new(n_intervals),
                Accumulator::new(n_breakpoints),
                Accumulator::new(n_breakpoints),
            ];
            let mut scratch = Vec::new();
            for trial in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(rng_seed, trial as u64));
                let edges = matched_edges(&stubs, &mut rng, &mut scratch);
                let values = crossing_values(
                    edges.iter().map(|(&(s, d), &w)| {
                        (stubs.names[s as usize].as_str(), stubs.names[d as usize].as_str(), w)
                    }),
                    &named,
                    &breakpoints,
                    mode,
                );
                acc[0].add(&values.interval_right);
                acc[1].add(&values.interval_left);
                acc[2].add(&values.at_right);
                acc[3].add(&values.at_left);
            }
            let [ir, il, ar, al] = acc;
            let (ir_mean, ir_se) = ir.finish(trials);
            let (il_mean, il_se) = il.finish(trials);
            let (ar_mean, ar_se) = ar.finish(trials);
            let (al_mean, al_se) = al.finish(trials);
            let values = CrossingValues {
                interval_right: ir_mean,
                interval_left: il_mean,
                at_right: ar_mean,
                at_left: al_mean,
            };
            Ok(NullCrossing {
                profile: CrossingProfile::from_parts(breakpoints, values, mode),
                std_err: Some(CrossingStdErr {
                    interval_right: ir_se,
                    interval_left: il_se,
                    at_right: ar_se,
                    at_left: al_se,
                }),
                trials,
            })
        }
    }
}

struct Accumulator {
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

impl Accumulator {
    fn new(len: usize) -> Self {
        Accumulator { sum: vec![0.0; len], sumsq: vec![0.0; len] }
    }

    fn add(&mut self, values: &[f64]) {
        for (i, &v) in values.iter().enumerate() {
            self.sum[i] += v;
            self.sumsq[i] += v * v;
        }
    }

    /// Per-slot mean and standard error of the mean.
    fn finish(self, trials: usize) -> (Vec<f64>, Vec<f64>) {
        let n = trials as f64;
        let means: Vec<f64> = self.sum.iter().map(|s| s / n).collect();
        let se = means
            .iter()
            .zip(&self.sumsq)
            .map(|(&mean, &sq)| {
                if trials < 2 {
                    0.0
                } else {
                    let variance = (sq - n * mean * mean).max(0.0) / (n - 1.0);
                    (variance / n).sqrt()
                }
            })
            .collect();
        (means, se)
    }
}

/// Scope of the user-shuffle null: permute authors over the whole dataset or
/// within each calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShuffleScope {
    Global,
    Monthly,
}

/// Randomly reassign authors to comments, preserving each author's comment
/// count exactly (globally, or within every calendar month). All other
/// fields are untouched.
pub fn shuffle_users(
    comments: &[RedditComment],
    scope: ShuffleScope,
    rng_seed: u64,
) -> Vec<RedditComment> {
    let mut shuffled: Vec<RedditComment> = comments.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    match scope {
        ShuffleScope::Global => {
            let mut authors: Vec<String> = comments.iter().map(|c| c.author.clone()).collect();
            authors.shuffle(&mut rng);
            for (comment, author) in shuffled.iter_mut().zip(authors) {
                comment.author = author;
            }
        }
        ShuffleScope::Monthly => {
            let mut groups: BTreeMap<Option<Month>, Vec<usize>> = BTreeMap::new();
            for (i, comment) in comments.iter().enumerate() {
                groups.entry(Month::from_timestamp(comment.created).ok()).or_default().push(i);
            }
            for indices in groups.values() {
                let mut authors: Vec<String> =
                    indices.iter().map(|&i| comments[i].author.clone()).collect();
                authors.shuffle(&mut rng);
                for (&i, author) in indices.iter().zip(authors) {
                    shuffled[i].author = author;
                }
            }
        }
    }
    shuffled
}

/// Observed rank correlation against uniformly shuffled orderings.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationTest {
    pub observed: f64,
    pub null_max: f64,
    /// Fraction of shuffled orderings at least as correlated as observed.
    pub fraction_geq: f64,
    pub trials: usize,
}

/// Permutation test for the Spearman correlation of two orderings: shuffle
/// the second ordering uniformly `trials` times and compare.
pub fn permutation_test_spearman<S: AsRef<str>>(
    order_a: &[S],
    order_b: &[S],
    trials: usize,
    rng_seed: u64,
) -> Result<PermutationTest, NullModelError> {
    if trials == 0 {
        return Err(NullModelError::ZeroTrials);
    }
    let observed = align::spearman(order_a, order_b)?;
    let n = order_a.len();
    let denominator = (n * (n * n - 1)) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut permutation: Vec<usize> = (0..n).collect();
    let mut null_max = f64::NEG_INFINITY;
    let mut at_least = 0usize;
    for _ in 0..trials {
        permutation.shuffle(&mut rng);
        let sum_d2: u64 = permutation
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                let d = i.abs_diff(j) as u64;
                d * d
            })
            .sum();
        let rho = 1.0 - 6.0 * sum_d2 as f64 / denominator;
        null_max = null_max.max(rho);
        if rho >= observed {
            at_least += 1;
        }
    }
    Ok(PermutationTest {
        observed,
        null_max,
        fraction_geq: at_least as f64 / trials as f64,
        trials,
    })
}

/// Observed crossing profile next to its rewired expectation. Both profiles
/// must share breakpoints (they come from the same graph). As in the plain
/// crossing emitter, rows with `y_lo == y_hi` carry the exact values at a
/// node score and the rows between them the open-interval values.
pub fn write_crossing_with_null_csv<W: std::io::Write>(
    mut writer: W,
    observed: &CrossingProfile,
    null: &CrossingProfile,
) -> std::io::Result<()> {
    writeln!(writer, "y_lo,y_hi,f_right,f_left,f_right_null,f_left_null")?;
    let breakpoints = observed.breakpoints();
    for (i, &b) in breakpoints.iter().enumerate() {
        writeln!(
            writer,
            "{b},{b},{},{},{},{}",
            observed.at_breakpoints_rightward()[i],
            observed.at_breakpoints_leftward()[i],
            null.at_breakpoints_rightward()[i],
            null.at_breakpoints_leftward()[i],
        )?;
        if i + 1 < breakpoints.len() {
            writeln!(
                writer,
                "{b},{},{},{},{},{}",
                breakpoints[i + 1],
                observed.rightward()[i],
                observed.leftward()[i],
                null.rightward()[i],
                null.leftward()[i],
            )?;
        }
    }
    Ok(())
}
