//! Synthetic datasets with planted structure, used to validate the whole
//! pipeline: known spectrum positions, a tunable homophily level, and a
//! tunable right-to-left linking bias.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ingest::{CoOccurrenceRecord, RedditComment, ReplyPairRecord, RetweetTotals};
use crate::month::Month;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("need at least 3 domains, got {0}")]
    TooFewDomains(usize),
    #[error("need at least one month")]
    NoMonths,
    #[error("volume scale must be positive")]
    ZeroVolume,
    #[error("bias must be non-negative, got {0}")]
    NegativeBias(f64),
    #[error("{what} must lie in [0, 1], got {got}")]
    BadShare { what: &'static str, got: f64 },
    #[error("comment generation needs {0}")]
    BadCommentConfig(&'static str),
}

/// Scores are planted on a fixed rational grid so the spectrum computation
/// recovers them exactly up to float rounding.
const SCORE_DENOMINATOR: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_domains: usize,
    /// Positive values make domains link near themselves on the spectrum,
    /// negative values make them link across it: expected edge weight is
    /// proportional to `exp(-homophily * |s_i - s_j|)`.
    pub homophily: f64,
    /// Extra multiplier `1 + bias` on edges from the right half
    /// (score > 0.5) to the left half (score < 0.5); zero means no bias.
    pub right_to_left_bias: f64,
    /// Base expected weight of a zero-distance edge.
    pub volume_scale: u64,
    pub months: Vec<Month>,
    pub rng_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_domains: 20,
            homophily: 0.0,
            right_to_left_bias: 0.0,
            volume_scale: 200,
            months: vec![Month::new(2016, 1).unwrap()],
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub reply_pairs: Vec<ReplyPairRecord>,
    pub cooccurrence: Vec<CoOccurrenceRecord>,
    pub retweet_totals: Vec<RetweetTotals>,
    /// Planted score per domain, sorted by domain.
    pub ground_truth: Vec<(String, f64)>,
}

/// Generate reply pairs, co-occurrence counts, and retweet totals with
/// planted scores. Deterministic for a given config.
///
/// Co-occurrence counts split a fixed per-month total in the exact planted
/// ratio, so the spectrum computed from the output reproduces each planted
/// score to float precision; edge weights follow the homophily/bias kernel,
/// rounded up so every ordered pair keeps at least weight one and the graph
/// stays connected.
pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput, SynthError> {
    if cfg.n_domains < 3 {
        return Err(SynthError::TooFewDomains(cfg.n_domains));
    }
    if cfg.months.is_empty() {
        return Err(SynthError::NoMonths);
    }
    if cfg.volume_scale == 0 {
        return Err(SynthError::ZeroVolume);
    }
    if cfg.right_to_left_bias < 0.0 {
        return Err(SynthError::NegativeBias(cfg.right_to_left_bias));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    // distinct numerators, never 0 or the full denominator
    let mut numerators: BTreeSet<u64> = BTreeSet::new();
    while numerators.len() < cfg.n_domains {
        numerators.insert(rng.gen_range(1..SCORE_DENOMINATOR));
    }
    let domains: Vec<String> =
        (0..cfg.n_domains).map(|i| format!("d{i:03}.test")).collect();
    let scores: Vec<f64> =
        numerators.iter().map(|&k| k as f64 / SCORE_DENOMINATOR as f64).collect();
    // shuffle score-to-domain assignment so domain labels carry no order
    let mut assignment: Vec<usize> = (0..cfg.n_domains).collect();
    use rand::seq::SliceRandom;
    assignment.shuffle(&mut rng);
    let numerator_of: Vec<u64> = {
        let ks: Vec<u64> = numerators.iter().copied().collect();
        (0..cfg.n_domains).map(|i| ks[assignment[i]]).collect()
    };
    let score_of: Vec<f64> = (0..cfg.n_domains).map(|i| scores[assignment[i]]).collect();

    let mut reply_pairs = Vec::new();
    let mut cooccurrence = Vec::new();
    let mut retweet_totals = Vec::new();
    for &month in &cfg.months {
        for i in 0..cfg.n_domains {
            for j in 0..cfg.n_domains {
                if i == j {
                    continue;
                }
                let distance = (score_of[i] - score_of[j]).abs();
                let mut expected =
                    cfg.volume_scale as f64 * (-cfg.homophily * distance).exp();
                if score_of[i] > 0.5 && score_of[j] < 0.5 {
                    expected *= 1.0 + cfg.right_to_left_bias;
                }
                let weight = expected.ceil() as u64;
                reply_pairs.push(ReplyPairRecord {
                    month,
                    src_domain: domains[i].clone(),
                    dst_domain: domains[j].clone(),
                    count: weight.max(1),
                });
            }
        }
        for i in 0..cfg.n_domains {
            cooccurrence.push(CoOccurrenceRecord {
                month,
                domain: domains[i].clone(),
                n_clinton: SCORE_DENOMINATOR - numerator_of[i],
                n_trump: numerator_of[i],
            });
        }
        retweet_totals.push(RetweetTotals {
            month,
            clinton_total: SCORE_DENOMINATOR,
            trump_total: SCORE_DENOMINATOR,
        });
    }
    let ground_truth: Vec<(String, f64)> =
        (0..cfg.n_domains).map(|i| (domains[i].clone(), score_of[i])).collect();
    Ok(SynthOutput { reply_pairs, cooccurrence, retweet_totals, ground_truth })
}

pub fn write_ground_truth<W: std::io::Write>(
    mut writer: W,
    ground_truth: &[(String, f64)],
) -> std::io::Result<()> {
    writeln!(writer, "domain,score")?;
    for (domain, score) in ground_truth {
        writeln!(writer, "{domain},{score}")?;
    }
    Ok(())
}

/// Synthetic forum with a planted linear trend in the cross-side reply
/// share.
#[derive(Debug, Clone)]
pub struct CommentSynthConfig {
    pub clinton_users: usize,
    pub trump_users: usize,
    pub days: u32,
    pub replies_per_day: u32,
    /// Probability that a reply crosses sides on the first day.
    pub cross_share_start: f64,
    /// Probability that a reply crosses sides on the last day.
    pub cross_share_end: f64,
    pub start_date: NaiveDate,
    pub clinton_sub: String,
    pub trump_sub: String,
    pub forum_sub: String,
    pub rng_seed: u64,
}

impl Default for CommentSynthConfig {
    fn default() -> Self {
        CommentSynthConfig {
            clinton_users: 40,
            trump_users: 40,
            days: 90,
            replies_per_day: 40,
            cross_share_start: 0.2,
            cross_share_end: 0.7,
            start_date: NaiveDate::from_ymd_opt(2016, 1, 1).unwrap(),
            clinton_sub: "hillaryclinton".to_string(),
            trump_sub: "The_Donald".to_string(),
            forum_sub: "politics".to_string(),
            rng_seed: 0,
        }
    }
}

/// Generate anchor-subreddit posts (fixing each user's side) plus a forum
/// reply stream whose cross-side share rises (or falls) linearly from
/// `cross_share_start` to `cross_share_end`.
pub fn generate_comments(cfg: &CommentSynthConfig) -> Result<Vec<RedditComment>, SynthError> {
    if cfg.clinton_users == 0 || cfg.trump_users == 0 {
        return Err(SynthError::BadCommentConfig("at least one user per side"));
    }
    if cfg.days < 2 {
        return Err(SynthError::BadCommentConfig("at least two days"));
    }
    if cfg.replies_per_day == 0 {
        return Err(SynthError::BadCommentConfig("at least one reply per day"));
    }
    for (what, got) in [
        ("cross_share_start", cfg.cross_share_start),
        ("cross_share_end", cfg.cross_share_end),
    ] {
        if !(0.0..=1.0).contains(&got) {
            return Err(SynthError::BadShare { what, got });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let clinton: Vec<String> = (0..cfg.clinton_users).map(|i| format!("c{i:04}")).collect();
    let trump: Vec<String> = (0..cfg.trump_users).map(|i| format!("t{i:04}")).collect();

    let epoch = cfg
        .start_date
        .and_hms_opt(0, 0, 0)
        .map(|dt| dt.and_utc().timestamp())
        .ok_or(SynthError::BadCommentConfig("a representable start date"))?;

    let mut comments = Vec::new();
    for (i, user) in clinton.iter().enumerate() {
        comments.push(RedditComment {
            id: format!("ac{i}"),
            parent_id: None,
            author: user.clone(),
            subreddit: cfg.clinton_sub.clone(),
            created: epoch + i as i64,
            domains: BTreeSet::new(),
        });
    }
    for (i, user) in trump.iter().enumerate() {
        comments.push(RedditComment {
            id: format!("at{i}"),
            parent_id: None,
            author: user.clone(),
            subreddit: cfg.trump_sub.clone(),
            created: epoch + i as i64,
            domains: BTreeSet::new(),
        });
    }

    let mut sequence = 0u64;
    for day in 0..cfg.days {
        let progress = day as f64 / (cfg.days - 1) as f64;
        let cross_share =
            cfg.cross_share_start + (cfg.cross_share_end - cfg.cross_share_start) * progress;
        let day_start = epoch + day as i64 * 86_400;
        for _ in 0..cfg.replies_per_day {
            let crosses = rng.gen_bool(cross_share);
            let replier_is_clinton = rng.gen_bool(0.5);
            let parent_is_clinton = if crosses { !replier_is_clinton } else { replier_is_clinton };
            let pick = |side_clinton: bool, rng: &mut ChaCha8Rng| -> String {
                if side_clinton {
                    clinton[rng.gen_range(0..clinton.len())].clone()
                } else {
                    trump[rng.gen_range(0..trump.len())].clone()
                }
            };
            let parent_author = pick(parent_is_clinton, &mut rng);
            let reply_author = pick(replier_is_clinton, &mut rng);
            let at = day_start + (sequence % 40_000) as i64 * 2;
            comments.push(RedditComment {
                id: format!("p{sequence}"),
                parent_id: None,
                author: parent_author,
                subreddit: cfg.forum_sub.clone(),
                created: at,
                domains: BTreeSet::new(),
            });
            comments.push(RedditComment {
                id: format!("r{sequence}"),
                parent_id: Some(format!("p{sequence}")),
                author: reply_author,
                subreddit: cfg.forum_sub.clone(),
                created: at + 1,
                domains: BTreeSet::new(),
            });
            sequence += 1;
        }
    }
    Ok(comments)
}
