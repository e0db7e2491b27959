//! Two-dimensional spectrum alignment and rank comparison.
//!
//! Two spectra of the same domains may sit at different absolute scales
//! (platforms carry URLs at different rates), so comparison first fits one
//! positive factor per axis. Both the squared-distance and the
//! absolute-distance objectives separate per axis: the first has the
//! closed-form projection solution, the second is minimized at a weighted
//! median of the coordinate ratios.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::IngestError;
use crate::spectrum::Spectrum;

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("vectors must have the same, nonzero length (got {0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("scale is undefined against an all-zero vector")]
    ZeroVector,
    #[error("weights must be non-negative, got {0}")]
    NegativeWeight(f64),
    #[error("rankings must be over the same items; `{0}` is unmatched")]
    ItemSetMismatch(String),
    #[error("item `{0}` appears more than once in a ranking")]
    DuplicateItem(String),
    #[error("need at least {needed} items, got {got}")]
    TooFewItems { needed: usize, got: usize },
    #[error("domains `{0}` and `{1}` have exactly equal scores; ranking is ambiguous")]
    TiedScores(String, String),
    #[error("the two spectra share no domains")]
    NoCommonDomains,
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error("ranking file: {0}")]
    Ingest(#[from] IngestError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
}

impl FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            other => Err(format!("unknown norm `{other}`, expected l1 or l2")),
        }
    }
}

/// Least-squares scale: the `c` minimizing the summed squared differences
/// between `u` and `c * v`, namely `(v . u) / (v . v)`.
pub fn solve_l2_scale(u: &[f64], v: &[f64]) -> Result<f64, AlignError> {
    if u.len() != v.len() || u.is_empty() {
        return Err(AlignError::LengthMismatch(u.len(), v.len()));
    }
    let vv: f64 = v.iter().map(|x| x * x).sum();
    if vv == 0.0 {
        return Err(AlignError::ZeroVector);
    }
    let vu: f64 = v.iter().zip(u).map(|(x, y)| x * y).sum();
    Ok(vu / vv)
}

/// Least-absolute-deviation scale: the `c` minimizing the summed absolute
/// differences between `u` and `c * v`, for non-negative `v`.
///
/// Pairs with `v = 0` contribute a constant and are dropped. The optimum is
/// a ratio `u_k / v_k` at the lower weighted median of the ratios under
/// weights `v`; on even splits the smaller optimal ratio is returned.
pub fn solve_l1_scale(u: &[f64], v: &[f64]) -> Result<f64, AlignError> {
    if u.len() != v.len() || u.is_empty() {
        return Err(AlignError::LengthMismatch(u.len(), v.len()));
    }
    if let Some(&bad) = v.iter().find(|&&x| x < 0.0) {
        return Err(AlignError::NegativeWeight(bad));
    }
    let mut pairs: Vec<(f64, f64)> = u
        .iter()
        .zip(v)
        .filter(|(_, &vi)| vi > 0.0)
        .map(|(&ui, &vi)| (ui / vi, vi))
        .collect();
    if pairs.is_empty() {
        return Err(AlignError::ZeroVector);
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total: f64 = pairs.iter().map(|(_, w)| w).sum();
    let mut cumulative = 0.0;
    for (ratio, weight) in &pairs {
        cumulative += weight;
        if cumulative >= total / 2.0 {
            return Ok(*ratio);
        }
    }
    Ok(pairs.last().unwrap().0) // unreachable for finite weights
}

fn l1_objective(u: &[f64], v: &[f64], c: f64) -> f64 {
    u.iter().zip(v).map(|(ui, vi)| (ui - c * vi).abs()).sum()
}

fn l2_objective(u: &[f64], v: &[f64], c: f64) -> f64 {
    u.iter().zip(v).map(|(ui, vi)| (ui - c * vi) * (ui - c * vi)).sum()
}

/// Per-axis scale factors aligning a source spectrum onto a target one.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    /// Factor applied to the source's `p_c` axis.
    pub scale_c: f64,
    /// Factor applied to the source's `p_t` axis.
    pub scale_t: f64,
    pub objective: f64,
    pub norm: Norm,
    /// Residuals `(target - scale * source)` per common domain, per axis.
    pub residuals: BTreeMap<String, (f64, f64)>,
}

fn common_domains(a: &Spectrum, b: &Spectrum) -> Vec<String> {
    let left: BTreeSet<&str> = a.domains().collect();
    b.domains().filter(|d| left.contains(d)).map(str::to_string).collect()
}

/// Align `source` onto `target` over their shared domains, fitting each axis
/// independently under the chosen norm.
pub fn align_spectra(
    target: &Spectrum,
    source: &Spectrum,
    norm: Norm,
) -> Result<AlignmentResult, AlignError> {
    let common = common_domains(target, source);
    if common.is_empty() {
        return Err(AlignError::NoCommonDomains);
    }
    let column = |spectrum: &Spectrum, take_t: bool| -> Vec<f64> {
        common
            .iter()
            .map(|d| {
                let p = spectrum.get(d).unwrap();
                if take_t {
                    p.p_t
                } else {
                    p.p_c
                }
            })
            .collect()
    };
    let u_c = column(target, false);
    let v_c = column(source, false);
    let u_t = column(target, true);
    let v_t = column(source, true);
    let (scale_c, scale_t, objective) = match norm {
        Norm::L2 => {
            let a = solve_l2_scale(&u_c, &v_c)?;
            let b = solve_l2_scale(&u_t, &v_t)?;
            (a, b, l2_objective(&u_c, &v_c, a) + l2_objective(&u_t, &v_t, b))
        }
        Norm::L1 => {
            let a = solve_l1_scale(&u_c, &v_c)?;
            let b = solve_l1_scale(&u_t, &v_t)?;
            (a, b, l1_objective(&u_c, &v_c, a) + l1_objective(&u_t, &v_t, b))
        }
    };
    let residuals = common
        .iter()
        .enumerate()
        .map(|(i, d)| (d.clone(), (u_c[i] - scale_c * v_c[i], u_t[i] - scale_t * v_t[i])))
        .collect();
    Ok(AlignmentResult { scale_c, scale_t, objective, norm, residuals })
}

/// Spearman rank correlation between two orderings of the same items.
/// The inputs are full orderings (rank 1 first); ties cannot be expressed
/// and duplicate items are rejected.
pub fn spearman<S: AsRef<str>>(order_a: &[S], order_b: &[S]) -> Result<f64, AlignError> {
    if order_a.len() != order_b.len() {
        return Err(AlignError::LengthMismatch(order_a.len(), order_b.len()));
    }
    let n = order_a.len();
    if n < 2 {
        return Err(AlignError::TooFewItems { needed: 2, got: n });
    }
    let mut rank_a: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, item) in order_a.iter().enumerate() {
        if rank_a.insert(item.as_ref(), i).is_some() {
            return Err(AlignError::DuplicateItem(item.as_ref().to_string()));
        }
    }
    let mut seen_b: BTreeSet<&str> = BTreeSet::new();
    let mut sum_d2: u64 = 0;
    for (j, item) in order_b.iter().enumerate() {
        if !seen_b.insert(item.as_ref()) {
            return Err(AlignError::DuplicateItem(item.as_ref().to_string()));
        }
        let i = *rank_a
            .get(item.as_ref())
            .ok_or_else(|| AlignError::ItemSetMismatch(item.as_ref().to_string()))?;
        let d = i.abs_diff(j) as u64;
        sum_d2 += d * d;
    }
    let n = n as f64;
    Ok(1.0 - 6.0 * sum_d2 as f64 / (n * (n * n - 1.0)))
}

/// Domains ordered by descending score. Exact score ties are rejected
/// rather than silently averaged.
pub fn rank_by_score(spectrum: &Spectrum) -> Result<Vec<String>, AlignError> {
    let mut domains: Vec<(&str, f64)> =
        spectrum.iter().map(|p| (p.domain.as_str(), p.score)).collect();
    domains.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(b.0)));
    for pair in domains.windows(2) {
        if pair[0].1 == pair[1].1 {
            return Err(AlignError::TiedScores(pair[0].0.to_string(), pair[1].0.to_string()));
        }
    }
    Ok(domains.into_iter().map(|(d, _)| d.to_string()).collect())
}

/// Alignment quality of the real pairing against pairings with the source's
/// domain labels randomly permuted.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuffledBaseline {
    pub real_objective: f64,
    pub null_objectives: Vec<f64>,
    /// Fraction of null objectives less than or equal to the real one.
    pub fraction_leq: f64,
}

pub fn shuffled_alignment_baseline(
    target: &Spectrum,
    source: &Spectrum,
    norm: Norm,
    trials: usize,
    rng_seed: u64,
) -> Result<ShuffledBaseline, AlignError> {
    if trials == 0 {
        return Err(AlignError::ZeroTrials);
    }
    let real = align_spectra(target, source, norm)?;
    let common = common_domains(target, source);
    let u_c: Vec<f64> = common.iter().map(|d| target.get(d).unwrap().p_c).collect();
    let u_t: Vec<f64> = common.iter().map(|d| target.get(d).unwrap().p_t).collect();
    let s_c: Vec<f64> = common.iter().map(|d| source.get(d).unwrap().p_c).collect();
    let s_t: Vec<f64> = common.iter().map(|d| source.get(d).unwrap().p_t).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut indices: Vec<usize> = (0..common.len()).collect();
    let mut null_objectives = Vec::with_capacity(trials);
    for _ in 0..trials {
        indices.shuffle(&mut rng);
        let v_c: Vec<f64> = indices.iter().map(|&i| s_c[i]).collect();
        let v_t: Vec<f64> = indices.iter().map(|&i| s_t[i]).collect();
        let objective = match norm {
            Norm::L2 => {
                let a = solve_l2_scale(&u_c, &v_c)?;
                let b = solve_l2_scale(&u_t, &v_t)?;
                l2_objective(&u_c, &v_c, a) + l2_objective(&u_t, &v_t, b)
            }
            Norm::L1 => {
                let a = solve_l1_scale(&u_c, &v_c)?;
                let b = solve_l1_scale(&u_t, &v_t)?;
                l1_objective(&u_c, &v_c, a) + l1_objective(&u_t, &v_t, b)
            }
        };
        null_objectives.push(objective);
    }
    let leq = null_objectives.iter().filter(|&&o| o <= real.objective + 1e-12).count();
    Ok(ShuffledBaseline {
        real_objective: real.objective,
        fraction_leq: leq as f64 / trials as f64,
        null_objectives,
    })
}

/// Overlay CSV of a target spectrum and the rescaled source.
pub fn write_alignment_csv<W: Write>(
    mut writer: W,
    target: &Spectrum,
    source: &Spectrum,
    result: &AlignmentResult,
) -> std::io::Result<()> {
    writeln!(writer, "domain,p_c_target,p_t_target,p_c_scaled,p_t_scaled")?;
    for domain in result.residuals.keys() {
        let t = target.get(domain).unwrap();
        let s = source.get(domain).unwrap();
        writeln!(
            writer,
            "{},{},{},{},{}",
            domain,
            t.p_c,
            t.p_t,
            result.scale_c * s.p_c,
            result.scale_t * s.p_t
        )?;
    }
    Ok(())
}

pub const RANK_TABLE_HEADER: &str = "rank,domain_a,domain_b";

/// Side-by-side ranking table of two orderings.
pub fn write_rank_table_csv<W: Write>(
    mut writer: W,
    order_a: &[String],
    order_b: &[String],
) -> std::io::Result<()> {
    writeln!(writer, "{RANK_TABLE_HEADER}")?;
    for (i, (a, b)) in order_a.iter().zip(order_b).enumerate() {
        writeln!(writer, "{},{},{}", i + 1, a, b)?;
    }
    Ok(())
}

/// Read a ranking table back into its two orderings. Rows must be in rank
/// order starting from 1.
pub fn read_rank_table<R: Read>(reader: R) -> Result<(Vec<String>, Vec<String>), AlignError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let got = csv_reader
        .headers()
        .map_err(IngestError::from)?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if got != RANK_TABLE_HEADER {
        return Err(IngestError::BadHeader { expected: RANK_TABLE_HEADER, got }.into());
    }
    let mut order_a = Vec::new();
    let mut order_b = Vec::new();
    for record in csv_reader.records() {
        let record = record.map_err(IngestError::from)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad = |msg: &str| IngestError::BadRow { line, msg: msg.to_string() };
        let rank: usize = record
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("rank is not an integer"))?;
        if rank != order_a.len() + 1 {
            return Err(bad(&format!("expected rank {}, got {rank}", order_a.len() + 1)).into());
        }
        order_a.push(record.get(1).ok_or_else(|| bad("missing domain_a"))?.to_string());
        order_b.push(record.get(2).ok_or_else(|| bad("missing domain_b"))?.to_string());
    }
    Ok((order_a, order_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::SpectrumPoint;
    use proptest::prelude::*;

    #[test]
    fn l2_scale_examples() {
        let v = [1.0, 2.0, 3.0];
        assert_eq!(solve_l2_scale(&v, &v).unwrap(), 1.0);
        let u: Vec<f64> = v.iter().map(|x| 2.0 * x).collect();
        assert_eq!(solve_l2_scale(&u, &v).unwrap(), 2.0);
        assert_eq!(solve_l2_scale(&[1.0, 2.0], &[1.0, 1.0]).unwrap(), 1.5);
        assert!(matches!(
            solve_l2_scale(&[1.0], &[0.0]),
            Err(AlignError::ZeroVector)
        ));
    }

    #[test]
    fn l1_scale_examples() {
        // brute force over candidate ratios {1, 2, 10} gives 2 with objective 9
        let c = solve_l1_scale(&[1.0, 2.0, 10.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(c, 2.0);
        assert_eq!(l1_objective(&[1.0, 2.0, 10.0], &[1.0, 1.0, 1.0], c), 9.0);

        let v = [2.0, 5.0, 1.0];
        let u: Vec<f64> = v.iter().map(|x| 3.0 * x).collect();
        let c = solve_l1_scale(&u, &v).unwrap();
        assert_eq!(c, 3.0);
        assert_eq!(l1_objective(&u, &v, c), 0.0);

        // even split: both endpoints of [1,3] are optimal, the lower one wins
        let c = solve_l1_scale(&[1.0, 3.0], &[1.0, 1.0]).unwrap();
        assert_eq!(c, 1.0);
        assert_eq!(l1_objective(&[1.0, 3.0], &[1.0, 1.0], c), 2.0);
    }

    #[test]
    fn l1_scale_rejects_bad_weights() {
        assert!(matches!(
            solve_l1_scale(&[1.0, 2.0], &[0.0, 0.0]),
            Err(AlignError::ZeroVector)
        ));
        assert!(matches!(
            solve_l1_scale(&[1.0], &[-1.0]),
            Err(AlignError::NegativeWeight(_))
        ));
        // zero-weight pairs are dropped, not fitted
        assert_eq!(solve_l1_scale(&[99.0, 2.0], &[0.0, 1.0]).unwrap(), 2.0);
    }

    fn spectrum_from(points: &[(&str, f64, f64)]) -> Spectrum {
        Spectrum::from_points(
            Vec::new(),
            points
                .iter()
                .map(|&(d, p_c, p_t)| SpectrumPoint {
                    domain: d.to_string(),
                    p_c,
                    p_t,
                    score: p_t / (p_c + p_t),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_alignment_is_perfect() {
        let spec = spectrum_from(&[("a.com", 0.1, 0.4), ("b.com", 0.3, 0.2)]);
        for norm in [Norm::L1, Norm::L2] {
            let result = align_spectra(&spec, &spec, norm).unwrap();
            assert!((result.scale_c - 1.0).abs() < 1e-12);
            assert!((result.scale_t - 1.0).abs() < 1e-12);
            assert!(result.objective < 1e-12);
        }
    }

    #[test]
    fn halved_axes_need_a_factor_of_two() {
        let target = spectrum_from(&[("a.com", 0.1, 0.4), ("b.com", 0.3, 0.2)]);
        let source = spectrum_from(&[("a.com", 0.05, 0.2), ("b.com", 0.15, 0.1)]);
        for norm in [Norm::L1, Norm::L2] {
            let result = align_spectra(&target, &source, norm).unwrap();
            assert!((result.scale_c - 2.0).abs() < 1e-12);
            assert!((result.scale_t - 2.0).abs() < 1e-12);
            assert!(result.objective < 1e-12);
        }
    }

    #[test]
    fn objective_matches_a_recomputation_from_residuals() {
        let target = spectrum_from(&[
            ("a.com", 0.12, 0.40),
            ("b.com", 0.31, 0.22),
            ("c.com", 0.05, 0.33),
        ]);
        let source = spectrum_from(&[
            ("a.com", 0.30, 0.21),
            ("b.com", 0.70, 0.12),
            ("c.com", 0.16, 0.15),
        ]);
        for norm in [Norm::L1, Norm::L2] {
            let result = align_spectra(&target, &source, norm).unwrap();
            let recomputed: f64 = result
                .residuals
                .values()
                .map(|(dc, dt)| match norm {
                    Norm::L2 => dc * dc + dt * dt,
                    Norm::L1 => dc.abs() + dt.abs(),
                })
                .sum();
            assert!(result.objective > 0.0);
            assert!((result.objective - recomputed).abs() < 1e-9);
        }
    }

    #[test]
    fn alignment_needs_common_domains() {
        let a = spectrum_from(&[("a.com", 0.1, 0.4)]);
        let b = spectrum_from(&[("b.com", 0.1, 0.4)]);
        assert!(matches!(align_spectra(&a, &b, Norm::L2), Err(AlignError::NoCommonDomains)));
    }

    #[test]
    fn spearman_identity_and_reversal() {
        let items: Vec<String> = (0..21).map(|i| format!("d{i}.com")).collect();
        assert_eq!(spearman(&items, &items).unwrap(), 1.0);
        let reversed: Vec<String> = items.iter().rev().cloned().collect();
        assert!((spearman(&items, &reversed).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_rejects_mismatch_and_duplicates() {
        let a = vec!["x".to_string(), "y".to_string()];
        let b = vec!["x".to_string(), "z".to_string()];
        assert!(matches!(spearman(&a, &b), Err(AlignError::ItemSetMismatch(_))));
        let dup = vec!["x".to_string(), "x".to_string()];
        assert!(matches!(spearman(&dup, &a), Err(AlignError::DuplicateItem(_))));
        let single = vec!["x".to_string()];
        assert!(matches!(
            spearman(&single, &single),
            Err(AlignError::TooFewItems { .. })
        ));
    }

    #[test]
    fn rank_by_score_is_descending_and_rejects_ties() {
        let spec = spectrum_from(&[("a.com", 0.8, 0.2), ("b.com", 0.2, 0.8), ("c.com", 0.5, 0.5)]);
        let order = rank_by_score(&spec).unwrap();
        assert_eq!(order, ["b.com", "c.com", "a.com"]);

        let tied = spectrum_from(&[("a.com", 0.5, 0.5), ("b.com", 0.3, 0.3)]);
        assert!(matches!(rank_by_score(&tied), Err(AlignError::TiedScores(_, _))));
    }

    #[test]
    fn rank_table_round_trip() {
        let a: Vec<String> = (0..5).map(|i| format!("a{i}.com")).collect();
        let b: Vec<String> = (0..5).rev().map(|i| format!("a{i}.com")).collect();
        let mut out = Vec::new();
        write_rank_table_csv(&mut out, &a, &b).unwrap();
        let (ra, rb) = read_rank_table(out.as_slice()).unwrap();
        assert_eq!(ra, a);
        assert_eq!(rb, b);
    }

    #[test]
    fn single_domain_baseline_is_degenerate() {
        let spec = spectrum_from(&[("a.com", 0.1, 0.4)]);
        let base = shuffled_alignment_baseline(&spec, &spec, Norm::L2, 8, 7).unwrap();
        assert!(base.real_objective < 1e-12);
        for null in &base.null_objectives {
            assert!((null - base.real_objective).abs() < 1e-12);
        }
        assert_eq!(base.fraction_leq, 1.0);
    }

    #[test]
    fn identical_spectra_beat_every_shuffle() {
        let spec = spectrum_from(&[
            ("a.com", 0.01, 0.40),
            ("b.com", 0.10, 0.30),
            ("c.com", 0.25, 0.02),
            ("d.com", 0.33, 0.15),
        ]);
        let base = shuffled_alignment_baseline(&spec, &spec, Norm::L2, 50, 3).unwrap();
        assert!(base.real_objective < 1e-12);
        assert!(base.null_objectives.iter().all(|&o| o >= base.real_objective));
    }

    fn arbitrary_vectors() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        proptest::collection::vec((0.0f64..5.0, 0.01f64..5.0), 1..20)
            .prop_map(|pairs| pairs.into_iter().unzip())
    }

    proptest! {
        // gradient of the squared objective vanishes at the solution, and
        // nudging the scale cannot improve either objective
        #[test]
        fn solutions_are_local_minima((u, v) in arbitrary_vectors()) {
            let c2 = solve_l2_scale(&u, &v).unwrap();
            let gradient: f64 =
                u.iter().zip(&v).map(|(ui, vi)| -2.0 * vi * (ui - c2 * vi)).sum();
            prop_assert!(gradient.abs() < 1e-9);
            for delta in [-1e-3, 1e-3] {
                prop_assert!(l2_objective(&u, &v, c2) <= l2_objective(&u, &v, c2 + delta) + 1e-12);
                let c1 = solve_l1_scale(&u, &v).unwrap();
                prop_assert!(l1_objective(&u, &v, c1) <= l1_objective(&u, &v, c1 + delta) + 1e-12);
            }
        }

        // the absolute-deviation optimum sits on a candidate ratio
        #[test]
        fn l1_optimum_is_a_breakpoint((u, v) in arbitrary_vectors()) {
            let c = solve_l1_scale(&u, &v).unwrap();
            let best_candidate = u
                .iter()
                .zip(&v)
                .map(|(ui, vi)| l1_objective(&u, &v, ui / vi))
                .fold(f64::INFINITY, f64::min);
            prop_assert!(l1_objective(&u, &v, c) <= best_candidate + 1e-9);
        }

        // scaling u scales both solutions linearly
        #[test]
        fn solvers_are_scale_equivariant((u, v) in arbitrary_vectors(), alpha in 0.01f64..50.0) {
            let scaled: Vec<f64> = u.iter().map(|x| alpha * x).collect();
            let l2 = solve_l2_scale(&u, &v).unwrap();
            let l2_scaled = solve_l2_scale(&scaled, &v).unwrap();
            prop_assert!((l2_scaled - alpha * l2).abs() < 1e-9 * (1.0 + alpha * l2.abs()));
            let l1 = solve_l1_scale(&u, &v).unwrap();
            let l1_scaled = solve_l1_scale(&scaled, &v).unwrap();
            prop_assert!((l1_scaled - alpha * l1).abs() < 1e-9 * (1.0 + alpha * l1.abs()));
        }

        // spearman is symmetric and blind to item labels
        #[test]
        fn spearman_symmetry_and_relabeling(perm in proptest::sample::subsequence((0..30usize).collect::<Vec<_>>(), 2..30)) {
            let a: Vec<String> = perm.iter().map(|i| format!("d{i}.com")).collect();
            let mut b = a.clone();
            b.reverse();
            b.swap(0, perm.len() / 2);
            let ab = spearman(&a, &b).unwrap();
            let ba = spearman(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);

            // consistent relabeling of every item changes nothing
            let relabel = |s: &String| format!("x-{s}");
            let a2: Vec<String> = a.iter().map(relabel).collect();
            let b2: Vec<String> = b.iter().map(relabel).collect();
            prop_assert!((spearman(&a2, &b2).unwrap() - ab).abs() < 1e-12);
        }
    }
}
