//! Measurements of an invocation graph embedded in a spectrum: out-link
//! landing distributions and their deviation from the graph-wide baseline,
//! the per-month regression slope, edge-length histograms, crossing
//! profiles, and in/out asymmetry.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphbuild::InvocationGraph;
use crate::month::Month;
use crate::spectrum::Spectrum;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("node `{0}` has no score in the spectrum")]
    MissingScore(String),
    #[error("domain `{0}` is not in the graph")]
    UnknownDomain(String),
    #[error("domain `{0}` has no out-links; its out-link distribution is undefined")]
    NoOutLinks(String),
    #[error("removing `{0}` leaves no edges; the baseline distribution is undefined")]
    EmptyBaseline(String),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("all points share one score; the regression slope is undefined")]
    DegenerateScores,
    #[error("histogram needs at least one bin")]
    ZeroBins,
}

/// Whether an edge contributes 1 (`Count`) or its weight (`Weight`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightMode {
    Count,
    Weight,
}

impl WeightMode {
    fn mass(&self, weight: u64) -> f64 {
        match self {
            WeightMode::Count => 1.0,
            WeightMode::Weight => weight as f64,
        }
    }
}

/// Where a domain's out-links land on the spectrum, against the baseline of
/// the graph with that domain removed.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlinkStats {
    pub domain: String,
    /// Weighted mean score of this domain's out-link targets.
    pub mean_landing: f64,
    /// Weighted mean landing score over all edges of the graph with this
    /// domain (and its incident edges) removed.
    pub baseline_landing: f64,
    /// `mean_landing - baseline_landing`: deviation toward the upper end.
    pub deviation: f64,
    pub out_volume: u64,
}

/// Least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Regression of out-link deviation against score for one month's graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeResult {
    pub month: Month,
    pub slope: f64,
    pub intercept: f64,
    pub n_points: usize,
}

/// Edge-length mass over `[0,1]` in equal-width bins; the last bin is
/// closed on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthHistogram {
    pub mass: Vec<f64>,
    pub mode: WeightMode,
}

/// The crossing functions of an embedded graph, in two exact views.
///
/// Both functions are piecewise constant: they change value only at node
/// scores (the breakpoints). Because crossing is strict, the value exactly
/// at a breakpoint can differ from the value on either adjacent open
/// interval, so the profile stores interval values (for integration and
/// step plots) and at-breakpoint values (for pointwise queries) separately.
/// Everything outside the breakpoint span is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingProfile {
    breakpoints: Vec<f64>,
    /// Values on the open interval (breakpoints[i], breakpoints[i+1]).
    rightward: Vec<f64>,
    leftward: Vec<f64>,
    /// Values exactly at each breakpoint.
    at_rightward: Vec<f64>,
    at_leftward: Vec<f64>,
    pub mode: WeightMode,
}

impl CrossingProfile {
    pub(crate) fn from_parts(
        breakpoints: Vec<f64>,
        values: CrossingValues,
        mode: WeightMode,
    ) -> Self {
        debug_assert_eq!(values.interval_right.len(), breakpoints.len().saturating_sub(1));
        debug_assert_eq!(values.at_right.len(), breakpoints.len());
        CrossingProfile {
            breakpoints,
            rightward: values.interval_right,
            leftward: values.interval_left,
            at_rightward: values.at_right,
            at_leftward: values.at_left,
            mode,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Open-interval values of the left-to-right crossing function.
    pub fn rightward(&self) -> &[f64] {
        &self.rightward
    }

    /// Open-interval values of the right-to-left crossing function.
    pub fn leftward(&self) -> &[f64] {
        &self.leftward
    }

    /// Exact values at the breakpoints themselves.
    pub fn at_breakpoints_rightward(&self) -> &[f64] {
        &self.at_rightward
    }

    pub fn at_breakpoints_leftward(&self) -> &[f64] {
        &self.at_leftward
    }

    /// Iterate `(y_lo, y_hi, rightward, leftward)` per open interval.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.rightward.iter().zip(&self.leftward))
            .map(|(w, (&r, &l))| (w[0], w[1], r, l))
    }

    /// Exact integral of the rightward crossing function over `[0,1]`.
    pub fn integral_rightward(&self) -> f64 {
        self.intervals().map(|(lo, hi, r, _)| r * (hi - lo)).sum()
    }

    /// Exact integral of the leftward crossing function over `[0,1]`.
    pub fn integral_leftward(&self) -> f64 {
        self.intervals().map(|(lo, hi, _, l)| l * (hi - lo)).sum()
    }
}

/// In- and out-weight of a domain and the share of traffic coming in.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryStats {
    pub domain: String,
    pub in_weight: u64,
    pub out_weight: u64,
    /// `in / (in + out)`: near 1 the domain is mostly replied to, near 0 it
    /// is mostly used to reply.
    pub inbound_ratio: f64,
}

/// Per-domain asymmetry plus the regression of the inbound ratio on score.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetryReport {
    pub stats: Vec<AsymmetryStats>,
    pub fit: Option<LineFit>,
}

pub(crate) fn ols(points: &[(f64, f64)]) -> Option<LineFit> {
    weighted_ols(points, None)
}

pub(crate) fn weighted_ols(points: &[(f64, f64)], weights: Option<&[f64]>) -> Option<LineFit> {
    if points.len() < 2 {
        return None;
    }
    let weight = |i: usize| weights.map_or(1.0, |w| w[i]);
    let total: f64 = (0..points.len()).map(weight).sum();
    if total <= 0.0 {
        return None;
    }
    let mean_x: f64 = points.iter().enumerate().map(|(i, p)| weight(i) * p.0).sum::<f64>() / total;
    let mean_y: f64 = points.iter().enumerate().map(|(i, p)| weight(i) * p.1).sum::<f64>() / total;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, &(x, y)) in points.iter().enumerate() {
        sxx += weight(i) * (x - mean_x) * (x - mean_x);
        sxy += weight(i) * (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(LineFit { slope, intercept: mean_y - slope * mean_x })
}

/// Score every node of the graph, failing on the first unscored one.
fn node_scores<'a>(
    graph: &'a InvocationGraph,
    spectrum: &Spectrum,
) -> Result<BTreeMap<&'a str, f64>, MetricsError> {
    graph
        .nodes()
        .iter()
        .map(|node| {
            spectrum
                .score(node)
                .map(|score| (node.as_str(), score))
                .ok_or_else(|| MetricsError::MissingScore(node.clone()))
        })
        .collect()
}

struct NodeFlows {
    out_weight: u64,
    in_weight: u64,
    /// Sum of `weight * score(target)` over out-edges.
    out_landing: f64,
    /// Sum of `weight * score(target)` over in-edges (target is this node).
    in_landing: f64,
}

fn flows<'a>(
    graph: &'a InvocationGraph,
    scores: &BTreeMap<&str, f64>,
) -> (BTreeMap<&'a str, NodeFlows>, f64, u64) {
    let mut per_node: BTreeMap<&str, NodeFlows> = graph
        .nodes()
        .iter()
        .map(|n| {
            (n.as_str(), NodeFlows { out_weight: 0, in_weight: 0, out_landing: 0.0, in_landing: 0.0 })
        })
        .collect();
    let mut total_landing = 0.0;
    let mut total_weight = 0u64;
    for ((src, dst), &weight) in graph.edges() {
        let landing = weight as f64 * scores[dst.as_str()];
        total_landing += landing;
        total_weight += weight;
        let src_flow = per_node.get_mut(src.as_str()).unwrap();
        src_flow.out_weight += weight;
        src_flow.out_landing += landing;
        let dst_flow = per_node.get_mut(dst.as_str()).unwrap();
        dst_flow.in_weight += weight;
        dst_flow.in_landing += landing;
    }
    (per_node, total_landing, total_weight)
}

fn stats_from_flows(
    domain: &str,
    flow: &NodeFlows,
    total_landing: f64,
    total_weight: u64,
) -> Result<OutlinkStats, MetricsError> {
    if flow.out_weight == 0 {
        return Err(MetricsError::NoOutLinks(domain.to_string()));
    }
    let excluded_weight = total_weight - flow.out_weight - flow.in_weight;
    if excluded_weight == 0 {
        return Err(MetricsError::EmptyBaseline(domain.to_string()));
    }
    let mean_landing = flow.out_landing / flow.out_weight as f64;
    let baseline_landing =
        (total_landing - flow.out_landing - flow.in_landing) / excluded_weight as f64;
    Ok(OutlinkStats {
        domain: domain.to_string(),
        mean_landing,
        baseline_landing,
        deviation: mean_landing - baseline_landing,
        out_volume: flow.out_weight,
    })
}

/// Out-link landing statistics for one domain.
pub fn outlink_stats(
    graph: &InvocationGraph,
    spectrum: &Spectrum,
    domain: &str,
) -> Result<OutlinkStats, MetricsError> {
    if !graph.nodes().contains(domain) {
        return Err(MetricsError::UnknownDomain(domain.to_string()));
    }
    let scores = node_scores(graph, spectrum)?;
    let (per_node, total_landing, total_weight) = flows(graph, &scores);
    stats_from_flows(domain, &per_node[domain], total_landing, total_weight)
}

/// Out-link statistics for every domain where they are defined. Domains
/// without out-links, or whose removal leaves no edges, are skipped.
pub fn all_outlink_stats(
    graph: &InvocationGraph,
    spectrum: &Spectrum,
) -> Result<Vec<OutlinkStats>, MetricsError> {
    let scores = node_scores(graph, spectrum)?;
    let (per_node, total_landing, total_weight) = flows(graph, &scores);
    Ok(per_node
        .iter()
        .filter_map(|(domain, flow)| {
            stats_from_flows(domain, flow, total_landing, total_weight).ok()
        })
        .collect())
}

/// Least-squares slope of out-link deviation against score, one point per
/// eligible domain. With `volume_weighted` each point is weighted by its
/// out-volume.
pub fn slope(
    graph: &InvocationGraph,
    spectrum: &Spectrum,
    volume_weighted: bool,
) -> Result<SlopeResult, MetricsError> {
    let stats = all_outlink_stats(graph, spectrum)?;
    if stats.len() < 2 {
        return Err(MetricsError::TooFewPoints { needed: 2, got: stats.len() });
    }
    let points: Vec<(f64, f64)> = stats
        .iter()
        .map(|s| (spectrum.score(&s.domain).unwrap(), s.deviation))
        .collect();
    let weights: Vec<f64> = stats.iter().map(|s| s.out_volume as f64).collect();
    let fit = weighted_ols(&points, volume_weighted.then_some(weights.as_slice()))
        .ok_or(MetricsError::DegenerateScores)?;
    Ok(SlopeResult {
        month: graph.month(),
        slope: fit.slope,
        intercept: fit.intercept,
        n_points: points.len(),
    })
}

/// Histogram of edge lengths `|score(src) - score(dst)|` over `[0,1]`.
pub fn edge_length_histogram(
    graph: &InvocationGraph,
    spectrum: &Spectrum,
    bins: usize,
    mode: WeightMode,
) -> Result<LengthHistogram, MetricsError> {
    if bins == 0 {
        return Err(MetricsError::ZeroBins);
    }
    let scores = node_scores(graph, spectrum)?;
    let mut mass = vec![0.0; bins];
    for ((src, dst), &weight) in graph.edges() {
        let length = (scores[src.as_str()] - scores[dst.as_str()]).abs();
        let bin = ((length * bins as f64) as usize).min(bins - 1);
        mass[bin] += mode.mass(weight);
    }
    Ok(LengthHistogram { mass, mode })
}

/// Interval index of a score among the breakpoints.
fn breakpoint_index(breakpoints: &[f64], score: f64) -> usize {
    breakpoints.partition_point(|&b| b < score)
}

pub(crate) struct CrossingValues {
    pub interval_right: Vec<f64>,
    pub interval_left: Vec<f64>,
    pub at_right: Vec<f64>,
    pub at_left: Vec<f64>,
}

/// Accumulate interval and at-breakpoint crossing mass for an edge set whose
/// endpoint scores all lie on the given breakpoints.
pub(crate) fn crossing_values<'a>(
    edges: impl Iterator<Item = (&'a str, &'a str, u64)>,
    scores: &BTreeMap<&str, f64>,
    breakpoints: &[f64],
    mode: WeightMode,
) -> CrossingValues {
    let n_breakpoints = breakpoints.len();
    let n_intervals = n_breakpoints.saturating_sub(1);
    let mut interval_diff = [vec![0.0; n_intervals + 1], vec![0.0; n_intervals + 1]];
    let mut at_diff = [vec![0.0; n_breakpoints + 1], vec![0.0; n_breakpoints + 1]];
    for (src, dst, weight) in edges {
        let s_src = scores[src];
        let s_dst = scores[dst];
        if s_src == s_dst {
            continue;
        }
        let mass = mode.mass(weight);
        let (side, lo_score, hi_score) =
            if s_src < s_dst { (0, s_src, s_dst) } else { (1, s_dst, s_src) };
        let lo = breakpoint_index(breakpoints, lo_score);
        let hi = breakpoint_index(breakpoints, hi_score);
        // every open interval strictly inside (lo_score, hi_score)
        interval_diff[side][lo] += mass;
        interval_diff[side][hi] -= mass;
        // every breakpoint strictly inside: indices lo+1 ..= hi-1
        at_diff[side][lo + 1] += mass;
        at_diff[side][hi] -= mass;
    }
    let prefix = |diff: &[f64], len: usize| {
        let mut acc = 0.0;
        diff.iter()
            .take(len)
            .map(|d| {
                acc += d;
                acc
            })
            .collect::<Vec<f64>>()
    };
    CrossingValues {
        interval_right: prefix(&interval_diff[0], n_intervals),
        interval_left: prefix(&interval_diff[1], n_intervals),
        at_right: prefix(&at_diff[0], n_breakpoints),
        at_left: prefix(&at_diff[1], n_breakpoints),
    }
}

pub(crate) fn distinct_breakpoints(scores: &BTreeMap<&str, f64>) -> Vec<f64> {
    let mut breakpoints: Vec<f64> = scores.values().copied().collect();
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breakpoints.dedup();
    breakpoints
}

/// The crossing functions of an embedded graph: for each point `y` strictly
/// between node scores, how much edge mass runs left-to-right across `y` and
/// how much right-to-left. Endpoints exactly at `y` do not cross.
pub fn crossing_profile(
    graph: &InvocationGraph,
    spectrum: &Spectrum,
    mode: WeightMode,
) -> Result<CrossingProfile, MetricsError> {
    let scores = node_scores(graph, spectrum)?;
    let breakpoints = distinct_breakpoints(&scores);
    let values = crossing_values(
        graph.edges().iter().map(|((s, d), &w)| (s.as_str(), d.as_str(), w)),
        &scores,
        &breakpoints,
        mode,
    );
    Ok(CrossingProfile::from_parts(breakpoints, values, mode))
}

/// Crossing mass at one exact point `y`, with strict inequalities.
pub fn crossing_at(
    graph: &InvocationGraph,
    spectrum: &Spectrum,
    y: f64,
    mode: WeightMode,
) -> Result<(f64, f64), MetricsError> {
    let scores = node_scores(graph, spectrum)?;
    let mut rightward = 0.0;
    let mut leftward = 0.0;
    for ((src, dst), &weight) in graph.edges() {
        let s_src = scores[src.as_str()];
        let s_dst = scores[dst.as_str()];
        if s_src < y && y < s_dst {
            rightward += mode.mass(weight);
        } else if s_dst < y && y < s_src {
            leftward += mode.mass(weight);
        }
    }
    Ok((rightward, leftward))
}

/// Per-domain inbound ratio and its regression against score. Nodes with no
/// incident edges are skipped; the fit is `None` when fewer than two usable
/// points remain or all scores coincide.
pub fn asymmetry(
    graph: &InvocationGraph,
    spectrum: &Spectrum,
    mode: WeightMode,
) -> Result<AsymmetryReport, MetricsError> {
    let scores = node_scores(graph, spectrum)?;
    let mut in_w: BTreeMap<&str, u64> = BTreeMap::new();
    let mut out_w: BTreeMap<&str, u64> = BTreeMap::new();
    for ((src, dst), &weight) in graph.edges() {
        let mass = match mode {
            WeightMode::Count => 1,
            WeightMode::Weight => weight,
        };
        *out_w.entry(src.as_str()).or_insert(0) += mass;
        *in_w.entry(dst.as_str()).or_insert(0) += mass;
    }
    let mut stats = Vec::new();
    let mut points = Vec::new();
    for node in graph.nodes() {
        let inbound = in_w.get(node.as_str()).copied().unwrap_or(0);
        let outbound = out_w.get(node.as_str()).copied().unwrap_or(0);
        if inbound + outbound == 0 {
            continue;
        }
        let ratio = inbound as f64 / (inbound + outbound) as f64;
        points.push((scores[node.as_str()], ratio));
        stats.push(AsymmetryStats {
            domain: node.clone(),
            in_weight: inbound,
            out_weight: outbound,
            inbound_ratio: ratio,
        });
    }
    Ok(AsymmetryReport { fit: ols(&points), stats })
}

pub fn write_outlink_csv<W: Write>(
    mut writer: W,
    spectrum: &Spectrum,
    stats: &[OutlinkStats],
) -> std::io::Result<()> {
    writeln!(writer, "domain,score,delta_out")?;
    for s in stats {
        let score = spectrum.score(&s.domain).unwrap_or(f64::NAN);
        writeln!(writer, "{},{},{}", s.domain, score, s.deviation)?;
    }
    Ok(())
}

pub fn write_slopes_csv<W: Write>(mut writer: W, slopes: &[SlopeResult]) -> std::io::Result<()> {
    writeln!(writer, "month,slope")?;
    for s in slopes {
        writeln!(writer, "{},{}", s.month, s.slope)?;
    }
    Ok(())
}

pub fn write_length_histogram_csv<W: Write>(
    mut writer: W,
    histogram: &LengthHistogram,
) -> std::io::Result<()> {
    writeln!(writer, "bin_lo,bin_hi,mass")?;
    let bins = histogram.mass.len();
    for (i, mass) in histogram.mass.iter().enumerate() {
        let lo = i as f64 / bins as f64;
        let hi = (i + 1) as f64 / bins as f64;
        writeln!(writer, "{lo},{hi},{mass}")?;
    }
    Ok(())
}

/// Emit a crossing profile. Rows with `y_lo == y_hi` carry the exact value
/// at that node score; rows with `y_lo < y_hi` carry the constant value on
/// the open interval between consecutive scores.
pub fn write_crossing_csv<W: Write>(
    mut writer: W,
    profile: &CrossingProfile,
) -> std::io::Result<()> {
    writeln!(writer, "y_lo,y_hi,f_right,f_left")?;
    for (i, &b) in profile.breakpoints().iter().enumerate() {
        let at_r = profile.at_breakpoints_rightward()[i];
        let at_l = profile.at_breakpoints_leftward()[i];
        writeln!(writer, "{b},{b},{at_r},{at_l}")?;
        if i + 1 < profile.breakpoints().len() {
            let hi = profile.breakpoints()[i + 1];
            writeln!(writer, "{b},{hi},{},{}", profile.rightward()[i], profile.leftward()[i])?;
        }
    }
    Ok(())
}

pub fn write_asymmetry_csv<W: Write>(
    mut writer: W,
    spectrum: &Spectrum,
    report: &AsymmetryReport,
) -> std::io::Result<()> {
    writeln!(writer, "domain,score,r")?;
    for s in &report.stats {
        let score = spectrum.score(&s.domain).unwrap_or(f64::NAN);
        writeln!(writer, "{},{},{}", s.domain, score, s.inbound_ratio)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::SpectrumPoint;
    use proptest::prelude::*;
    use std::collections::{BTreeMap, BTreeSet};

    /// Three-node toy graph: A at 0.1, B at 0.5, C at 0.9, with edges
    /// A->C (2), A->B (1), B->C (1), C->A (1), C->B (1).
    fn toy_graph() -> (InvocationGraph, Spectrum) {
        let nodes: BTreeSet<String> =
            ["a.com", "b.com", "c.com"].iter().map(|s| s.to_string()).collect();
        let edges: BTreeMap<(String, String), u64> = [
            (("a.com".into(), "c.com".into()), 2),
            (("a.com".into(), "b.com".into()), 1),
            (("b.com".into(), "c.com".into()), 1),
            (("c.com".into(), "a.com".into()), 1),
            (("c.com".into(), "b.com".into()), 1),
        ]
        .into();
        let graph = InvocationGraph::new("2016-10".parse().unwrap(), nodes, edges).unwrap();
        let spectrum = spectrum_with(&[("a.com", 0.1), ("b.com", 0.5), ("c.com", 0.9)]);
        (graph, spectrum)
    }

    fn spectrum_with(scores: &[(&str, f64)]) -> Spectrum {
        let points = scores
            .iter()
            .map(|&(domain, score)| SpectrumPoint {
                domain: domain.to_string(),
                p_c: 1.0 - score,
                p_t: score,
                score,
            })
            .collect();
        Spectrum::from_points(Vec::new(), points).unwrap()
    }

    #[test]
    fn outlink_stats_match_hand_computation() {
        let (graph, spectrum) = toy_graph();

        let a = outlink_stats(&graph, &spectrum, "a.com").unwrap();
        assert!((a.mean_landing - (0.9 * 2.0 + 0.5) / 3.0).abs() < 1e-12);
        assert!((a.baseline_landing - 0.7).abs() < 1e-12);
        assert!((a.deviation - ((0.9 * 2.0 + 0.5) / 3.0 - 0.7)).abs() < 1e-12);
        assert_eq!(a.out_volume, 3);

        let c = outlink_stats(&graph, &spectrum, "c.com").unwrap();
        assert!((c.mean_landing - 0.3).abs() < 1e-12);
        assert!((c.baseline_landing - 0.5).abs() < 1e-12);
        assert!((c.deviation + 0.2).abs() < 1e-12);
    }

    #[test]
    fn two_node_graph_has_no_baseline() {
        let nodes: BTreeSet<String> = ["a.com".to_string(), "b.com".to_string()].into();
        let edges: BTreeMap<(String, String), u64> =
            [(("a.com".into(), "b.com".into()), 1)].into();
        let graph = InvocationGraph::new("2016-01".parse().unwrap(), nodes, edges).unwrap();
        let spectrum = spectrum_with(&[("a.com", 0.2), ("b.com", 0.8)]);
        assert!(matches!(
            outlink_stats(&graph, &spectrum, "a.com"),
            Err(MetricsError::EmptyBaseline(_))
        ));
        assert!(matches!(
            outlink_stats(&graph, &spectrum, "b.com"),
            Err(MetricsError::NoOutLinks(_))
        ));
        assert!(matches!(
            outlink_stats(&graph, &spectrum, "z.com"),
            Err(MetricsError::UnknownDomain(_))
        ));
    }

    #[test]
    fn slope_matches_closed_form_on_toy_graph() {
        let (graph, spectrum) = toy_graph();
        let result = slope(&graph, &spectrum, false).unwrap();
        assert_eq!(result.n_points, 3);
        assert!((result.slope - (-1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn constant_deviation_gives_zero_slope() {
        // Symmetric two-way triangle: every node sees the same landscape.
        let nodes: BTreeSet<String> =
            ["a.com", "b.com", "c.com"].iter().map(|s| s.to_string()).collect();
        let mut edges: BTreeMap<(String, String), u64> = BTreeMap::new();
        for x in ["a.com", "b.com", "c.com"] {
            for y in ["a.com", "b.com", "c.com"] {
                if x != y {
                    edges.insert((x.into(), y.into()), 1);
                }
            }
        }
        let graph = InvocationGraph::new("2016-01".parse().unwrap(), nodes, edges).unwrap();
        let spectrum = spectrum_with(&[("a.com", 0.2), ("b.com", 0.5), ("c.com", 0.8)]);
        // deviation is not constant here, but a perfectly symmetric graph on
        // evenly spaced scores has slope symmetric around the midpoint; use
        // the direct property instead: equal deviations give slope zero.
        let stats = all_outlink_stats(&graph, &spectrum).unwrap();
        let points: Vec<(f64, f64)> =
            stats.iter().map(|s| (spectrum.score(&s.domain).unwrap(), 0.25)).collect();
        let fit = ols(&points).unwrap();
        assert_eq!(fit.slope, 0.0);
    }

    #[test]
    fn slope_needs_two_eligible_domains() {
        let nodes: BTreeSet<String> = ["a.com".to_string(), "b.com".to_string()].into();
        let edges: BTreeMap<(String, String), u64> =
            [(("a.com".into(), "b.com".into()), 1)].into();
        let graph = InvocationGraph::new("2016-01".parse().unwrap(), nodes, edges).unwrap();
        let spectrum = spectrum_with(&[("a.com", 0.2), ("b.com", 0.8)]);
        assert!(matches!(
            slope(&graph, &spectrum, false),
            Err(MetricsError::TooFewPoints { needed: 2, got: 0 })
        ));
    }

    #[test]
    fn edge_lengths_on_toy_graph() {
        let (graph, spectrum) = toy_graph();
        let hist = edge_length_histogram(&graph, &spectrum, 10, WeightMode::Weight).unwrap();
        let total: f64 = hist.mass.iter().sum();
        assert_eq!(total, 6.0);
        // lengths 0.4 at weight 3, lengths 0.8 at weight 3
        assert_eq!(hist.mass[4], 3.0);
        assert_eq!(hist.mass[8], 3.0);
    }

    #[test]
    fn equal_scores_put_all_mass_in_first_bin_and_full_length_in_last() {
        let nodes: BTreeSet<String> = ["a.com".to_string(), "b.com".to_string()].into();
        let edges: BTreeMap<(String, String), u64> =
            [(("a.com".into(), "b.com".into()), 4)].into();
        let graph = InvocationGraph::new("2016-01".parse().unwrap(), nodes, edges).unwrap();

        let flat = spectrum_with(&[("a.com", 0.5), ("b.com", 0.5)]);
        let hist = edge_length_histogram(&graph, &flat, 5, WeightMode::Weight).unwrap();
        assert_eq!(hist.mass[0], 4.0);

        let extreme = spectrum_with(&[("a.com", 0.0), ("b.com", 1.0)]);
        let hist = edge_length_histogram(&graph, &extreme, 5, WeightMode::Weight).unwrap();
        assert_eq!(hist.mass[4], 4.0);

        assert!(matches!(
            edge_length_histogram(&graph, &flat, 0, WeightMode::Weight),
            Err(MetricsError::ZeroBins)
        ));
    }

    #[test]
    fn crossing_at_uses_strict_inequalities() {
        let (graph, spectrum) = toy_graph();
        // y = 0.5 sits exactly on b.com's score: its incident edges do not cross.
        let (right, left) = crossing_at(&graph, &spectrum, 0.5, WeightMode::Count).unwrap();
        assert_eq!((right, left), (1.0, 1.0));
        let (right, left) = crossing_at(&graph, &spectrum, 0.3, WeightMode::Count).unwrap();
        assert_eq!((right, left), (2.0, 1.0));
        let (right, left) = crossing_at(&graph, &spectrum, 0.0, WeightMode::Count).unwrap();
        assert_eq!((right, left), (0.0, 0.0));
    }

    #[test]
    fn crossing_profile_matches_pointwise_values_between_breakpoints() {
        let (graph, spectrum) = toy_graph();
        let profile = crossing_profile(&graph, &spectrum, WeightMode::Count).unwrap();
        assert_eq!(profile.breakpoints(), &[0.1, 0.5, 0.9]);
        for (lo, hi, right, left) in profile.intervals() {
            let y = (lo + hi) / 2.0;
            let (r, l) = crossing_at(&graph, &spectrum, y, WeightMode::Count).unwrap();
            assert_eq!((r, l), (right, left));
        }
        // and the stored at-breakpoint values match exact pointwise queries
        for (i, &b) in profile.breakpoints().iter().enumerate() {
            let (r, l) = crossing_at(&graph, &spectrum, b, WeightMode::Count).unwrap();
            assert_eq!(r, profile.at_breakpoints_rightward()[i]);
            assert_eq!(l, profile.at_breakpoints_leftward()[i]);
        }
        assert_eq!(profile.at_breakpoints_rightward()[1], 1.0);
        assert_eq!(profile.at_breakpoints_leftward()[1], 1.0);
    }

    #[test]
    fn asymmetry_on_toy_graph() {
        let (graph, spectrum) = toy_graph();
        let report = asymmetry(&graph, &spectrum, WeightMode::Weight).unwrap();
        let c = report.stats.iter().find(|s| s.domain == "c.com").unwrap();
        assert_eq!((c.in_weight, c.out_weight), (3, 2));
        assert!((c.inbound_ratio - 0.6).abs() < 1e-12);
        let b = report.stats.iter().find(|s| s.domain == "b.com").unwrap();
        assert_eq!((b.in_weight, b.out_weight), (2, 1));
        assert!(report.fit.is_some());
    }

    #[test]
    fn single_node_graph_has_empty_statistics() {
        let nodes: BTreeSet<String> = ["only.com".to_string()].into();
        let graph =
            InvocationGraph::new("2016-01".parse().unwrap(), nodes, BTreeMap::new()).unwrap();
        let spectrum = spectrum_with(&[("only.com", 0.4)]);

        let hist = edge_length_histogram(&graph, &spectrum, 8, WeightMode::Weight).unwrap();
        assert!(hist.mass.iter().all(|&m| m == 0.0));

        let profile = crossing_profile(&graph, &spectrum, WeightMode::Count).unwrap();
        assert_eq!(profile.breakpoints().len(), 1);
        assert_eq!(profile.integral_rightward(), 0.0);
        assert_eq!(profile.integral_leftward(), 0.0);

        // the lone node is isolated, so it is skipped and no fit exists
        let report = asymmetry(&graph, &spectrum, WeightMode::Weight).unwrap();
        assert!(report.stats.is_empty());
        assert!(report.fit.is_none());
    }

    #[test]
    fn asymmetry_boundaries() {
        // star: hub receives from a, sends to b
        let nodes: BTreeSet<String> =
            ["a.com", "b.com", "hub.com"].iter().map(|s| s.to_string()).collect();
        let edges: BTreeMap<(String, String), u64> = [
            (("a.com".into(), "hub.com".into()), 5),
            (("hub.com".into(), "b.com".into()), 7),
        ]
        .into();
        let graph = InvocationGraph::new("2016-01".parse().unwrap(), nodes, edges).unwrap();
        let spectrum = spectrum_with(&[("a.com", 0.1), ("b.com", 0.9), ("hub.com", 0.5)]);
        let report = asymmetry(&graph, &spectrum, WeightMode::Weight).unwrap();
        let by_domain: BTreeMap<&str, f64> =
            report.stats.iter().map(|s| (s.domain.as_str(), s.inbound_ratio)).collect();
        assert_eq!(by_domain["a.com"], 0.0); // only out-links
        assert_eq!(by_domain["b.com"], 1.0); // only in-links
    }

    fn arbitrary_embedded_graph() -> impl Strategy<Value = (InvocationGraph, Spectrum)> {
        (3usize..10, proptest::collection::vec(1u64..50, 2..40), 1u64..1_000_000)
            .prop_map(|(n, weights, seed)| {
                use rand::Rng;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let names: Vec<String> = (0..n).map(|i| format!("d{i}.com")).collect();
                let mut edges: BTreeMap<(String, String), u64> = BTreeMap::new();
                // spanning path keeps it connected
                for i in 1..n {
                    let w = weights[i % weights.len()];
                    if rng.gen_bool(0.5) {
                        edges.insert((names[i - 1].clone(), names[i].clone()), w);
                    } else {
                        edges.insert((names[i].clone(), names[i - 1].clone()), w);
                    }
                }
                for &w in &weights {
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(0..n);
                    if a != b {
                        *edges.entry((names[a].clone(), names[b].clone())).or_insert(0) += w;
                    }
                }
                let nodes: BTreeSet<String> = names.iter().cloned().collect();
                let graph =
                    InvocationGraph::new("2016-01".parse().unwrap(), nodes, edges).unwrap();
                let scores: Vec<(String, f64)> = names
                    .iter()
                    .enumerate()
                    .map(|(i, d)| (d.clone(), rng.gen_range(0.001..0.999) * 0.5 + i as f64 * 1e-4))
                    .collect();
                let points = scores
                    .iter()
                    .map(|(d, s)| SpectrumPoint {
                        domain: d.clone(),
                        p_c: 1.0 - s,
                        p_t: *s,
                        score: *s,
                    })
                    .collect();
                (graph, Spectrum::from_points(Vec::new(), points).unwrap())
            })
    }

    proptest! {
        // Exact duality: the integral of each crossing function equals the
        // summed signed edge lengths in that direction.
        #[test]
        fn crossing_length_duality((graph, spectrum) in arbitrary_embedded_graph()) {
            let profile = crossing_profile(&graph, &spectrum, WeightMode::Weight).unwrap();
            let mut rightward_lengths = 0.0;
            let mut leftward_lengths = 0.0;
            for ((src, dst), &w) in graph.edges() {
                let s_src = spectrum.score(src).unwrap();
                let s_dst = spectrum.score(dst).unwrap();
                if s_src < s_dst {
                    rightward_lengths += w as f64 * (s_dst - s_src);
                } else {
                    leftward_lengths += w as f64 * (s_src - s_dst);
                }
            }
            prop_assert!((profile.integral_rightward() - rightward_lengths).abs() < 1e-9);
            prop_assert!((profile.integral_leftward() - leftward_lengths).abs() < 1e-9);
        }

        // Means stay inside the span of scores, and the volume-weighted mean
        // of per-domain landings equals the global landing mean.
        #[test]
        fn landing_means_are_consistent((graph, spectrum) in arbitrary_embedded_graph()) {
            let scores: Vec<f64> = graph.nodes().iter().map(|n| spectrum.score(n).unwrap()).collect();
            let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let stats = all_outlink_stats(&graph, &spectrum).unwrap();
            prop_assume!(!stats.is_empty());
            for s in &stats {
                prop_assert!(s.mean_landing >= min - 1e-12 && s.mean_landing <= max + 1e-12);
                prop_assert!(s.baseline_landing >= min - 1e-12 && s.baseline_landing <= max + 1e-12);
            }
            // global consistency over all domains with out-links (every node
            // with out-links appears when the baseline is defined)
            let all: Vec<(f64, u64)> = graph
                .nodes()
                .iter()
                .filter(|n| graph.out_weight(n) > 0)
                .map(|n| {
                    let landing: f64 = graph
                        .edges()
                        .iter()
                        .filter(|((src, _), _)| src == n)
                        .map(|((_, dst), &w)| w as f64 * spectrum.score(dst).unwrap())
                        .sum();
                    let volume = graph.out_weight(n);
                    (landing / volume as f64, volume)
                })
                .collect();
            let total_volume: u64 = all.iter().map(|(_, v)| v).sum();
            let weighted_mean: f64 =
                all.iter().map(|(m, v)| m * *v as f64).sum::<f64>() / total_volume as f64;
            let global: f64 = graph
                .edges()
                .iter()
                .map(|((_, dst), &w)| w as f64 * spectrum.score(dst).unwrap())
                .sum::<f64>()
                / graph.total_weight() as f64;
            prop_assert!((weighted_mean - global).abs() < 1e-9);
        }

        // Scaling every weight by the same factor changes nothing.
        #[test]
        fn uniform_weight_scaling_is_invisible(
            (graph, spectrum) in arbitrary_embedded_graph(),
            factor in 2u64..6,
        ) {
            let scaled_edges: BTreeMap<(String, String), u64> = graph
                .edges()
                .iter()
                .map(|(k, &w)| (k.clone(), w * factor))
                .collect();
            let scaled =
                InvocationGraph::new(graph.month(), graph.nodes().clone(), scaled_edges).unwrap();
            let base = all_outlink_stats(&graph, &spectrum).unwrap();
            let big = all_outlink_stats(&scaled, &spectrum).unwrap();
            prop_assert_eq!(base.len(), big.len());
            for (x, y) in base.iter().zip(&big) {
                prop_assert!((x.deviation - y.deviation).abs() < 1e-9);
            }
            if let (Ok(s1), Ok(s2)) = (slope(&graph, &spectrum, false), slope(&scaled, &spectrum, false)) {
                prop_assert!((s1.slope - s2.slope).abs() < 1e-9);
            }
        }

        // Breakpoints come from node scores only.
        #[test]
        fn breakpoints_are_node_scores((graph, spectrum) in arbitrary_embedded_graph()) {
            let profile = crossing_profile(&graph, &spectrum, WeightMode::Count).unwrap();
            let node_scores: BTreeSet<String> = graph
                .nodes()
                .iter()
                .map(|n| format!("{}", spectrum.score(n).unwrap()))
                .collect();
            for b in profile.breakpoints() {
                let key = format!("{b}");
                prop_assert!(node_scores.contains(&key), "breakpoint {} is not a node score", key);
            }
        }
    }
}
