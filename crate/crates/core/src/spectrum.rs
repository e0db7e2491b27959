//! The data-induced political spectrum.
//!
//! Each domain gets a pair of empirical probabilities: `p_c`, the chance a
//! user tweeted the domain on a day they retweeted the Clinton account, and
//! `p_t` likewise for Trump. The scalar score `p_t / (p_c + p_t)` places each
//! domain in `[0, 1]`, with 0 the Clinton end and 1 the Trump end. The same
//! construction applies to Reddit anchor subreddits.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use thiserror::Error;

use crate::ingest::{CoOccurrenceRecord, IngestError, RedditComment, RetweetTotals};
use crate::month::Month;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("month range is empty")]
    EmptyPeriod,
    #[error("no retweet totals for month {0}")]
    MissingTotals(Month),
    #[error("zero {side} retweet total for month {month}")]
    ZeroTotal { month: Month, side: &'static str },
    #[error("subreddit `{0}` has no posts or comments")]
    EmptySubreddit(String),
    #[error("domain `{domain}`: {msg}")]
    InvalidPoint { domain: String, msg: String },
    #[error("spectrum file: {0}")]
    Ingest(#[from] IngestError),
}

/// A domain's position on the two-dimensional spectrum and its scalar score.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPoint {
    pub domain: String,
    pub p_c: f64,
    pub p_t: f64,
    pub score: f64,
}

fn political_score(p_c: f64, p_t: f64) -> f64 {
    p_t / (p_c + p_t)
}

/// A spectrum over a set of domains for some period.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    period: Vec<Month>,
    points: BTreeMap<String, SpectrumPoint>,
}

impl Spectrum {
    /// Wrap a set of points, checking the per-point invariants.
    pub fn from_points(
        period: Vec<Month>,
        points: Vec<SpectrumPoint>,
    ) -> Result<Self, SpectrumError> {
        let mut map = BTreeMap::new();
        for point in points {
            let invalid = |msg: String| SpectrumError::InvalidPoint {
                domain: point.domain.clone(),
                msg,
            };
            if !(point.p_c >= 0.0 && point.p_t >= 0.0 && point.p_c + point.p_t > 0.0) {
                return Err(invalid(format!(
                    "probabilities must be non-negative with a positive sum, got ({}, {})",
                    point.p_c, point.p_t
                )));
            }
            let expected = political_score(point.p_c, point.p_t);
            if (point.score - expected).abs() > 1e-9 {
                return Err(invalid(format!(
                    "score {} does not match p_t/(p_c+p_t) = {expected}",
                    point.score
                )));
            }
            let domain = point.domain.clone();
            if map.insert(domain.clone(), point).is_some() {
                return Err(SpectrumError::InvalidPoint { domain, msg: "duplicate domain".into() });
            }
        }
        Ok(Spectrum { period, points: map })
    }

    pub fn period(&self) -> &[Month] {
        &self.period
    }

    pub fn get(&self, domain: &str) -> Option<&SpectrumPoint> {
        self.points.get(domain)
    }

    pub fn score(&self, domain: &str) -> Option<f64> {
        self.points.get(domain).map(|p| p.score)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn domains(&self) -> impl Iterator<Item = &str> {
        self.points.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SpectrumPoint> {
        self.points.values()
    }
}

/// Political engagement per domain: total same-day co-occurrences with either
/// anchor account over the given months.
pub fn compute_engagement(
    cooccur: &[CoOccurrenceRecord],
    months: &[Month],
) -> BTreeMap<String, u64> {
    let wanted: BTreeSet<Month> = months.iter().copied().collect();
    let mut engagement: BTreeMap<String, u64> = BTreeMap::new();
    for record in cooccur.iter().filter(|r| wanted.contains(&r.month)) {
        *engagement.entry(record.domain.clone()).or_insert(0) +=
            record.n_clinton + record.n_trump;
    }
    engagement
}

/// Build the spectrum from co-occurrence counts and retweet totals pooled
/// over a month range: numerators and denominators are summed across months
/// before dividing. Domains never co-occurring with either anchor are
/// excluded. Every month in the range must have positive totals.
pub fn compute_spectrum(
    cooccur: &[CoOccurrenceRecord],
    totals: &[RetweetTotals],
    months: &[Month],
) -> Result<Spectrum, SpectrumError> {
    if months.is_empty() {
        return Err(SpectrumError::EmptyPeriod);
    }
    let by_month: BTreeMap<Month, &RetweetTotals> =
        totals.iter().map(|t| (t.month, t)).collect();
    let mut clinton_denominator: u64 = 0;
    let mut trump_denominator: u64 = 0;
    for month in months {
        let t = by_month
            .get(month)
            .ok_or(SpectrumError::MissingTotals(*month))?;
        if t.clinton_total == 0 {
            return Err(SpectrumError::ZeroTotal { month: *month, side: "clinton" });
        }
        if t.trump_total == 0 {
            return Err(SpectrumError::ZeroTotal { month: *month, side: "trump" });
        }
        clinton_denominator += t.clinton_total;
        trump_denominator += t.trump_total;
    }

    let wanted: BTreeSet<Month> = months.iter().copied().collect();
    let mut numerators: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for record in cooccur.iter().filter(|r| wanted.contains(&r.month)) {
        let entry = numerators.entry(record.domain.clone()).or_insert((0, 0));
        entry.0 += record.n_clinton;
        entry.1 += record.n_trump;
    }

    let points = numerators
        .into_iter()
        .filter(|(_, (n_c, n_t))| n_c + n_t > 0)
        .map(|(domain, (n_c, n_t))| {
            let p_c = n_c as f64 / clinton_denominator as f64;
            let p_t = n_t as f64 / trump_denominator as f64;
            SpectrumPoint { domain, p_c, p_t, score: political_score(p_c, p_t) }
        })
        .collect();
    Spectrum::from_points(months.to_vec(), points)
}

/// Build a spectrum from Reddit anchor subreddits: `p_c` is the fraction of
/// posts/comments in the Clinton subreddit containing at least one URL from
/// the domain, and likewise for Trump.
pub fn reddit_spectrum(
    comments: &[RedditComment],
    clinton_sub: &str,
    trump_sub: &str,
) -> Result<Spectrum, SpectrumError> {
    let mut clinton_total: u64 = 0;
    let mut trump_total: u64 = 0;
    let mut counts: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for comment in comments {
        let slot = if comment.subreddit == clinton_sub {
            clinton_total += 1;
            0
        } else if comment.subreddit == trump_sub {
            trump_total += 1;
            1
        } else {
            continue;
        };
        for domain in &comment.domains {
            let entry = counts.entry(domain.clone()).or_insert((0, 0));
            if slot == 0 {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    if clinton_total == 0 {
        return Err(SpectrumError::EmptySubreddit(clinton_sub.to_string()));
    }
    if trump_total == 0 {
        return Err(SpectrumError::EmptySubreddit(trump_sub.to_string()));
    }
    let points = counts
        .into_iter()
        .filter(|(_, (n_c, n_t))| n_c + n_t > 0)
        .map(|(domain, (n_c, n_t))| {
            let p_c = n_c as f64 / clinton_total as f64;
            let p_t = n_t as f64 / trump_total as f64;
            SpectrumPoint { domain, p_c, p_t, score: political_score(p_c, p_t) }
        })
        .collect();
    Spectrum::from_points(Vec::new(), points)
}

pub const SPECTRUM_HEADER: &str = "domain,p_c,p_t,score";

pub fn write_spectrum<W: Write>(mut writer: W, spectrum: &Spectrum) -> std::io::Result<()> {
    writeln!(writer, "{SPECTRUM_HEADER}")?;
    for point in spectrum.iter() {
        writeln!(writer, "{},{},{},{}", point.domain, point.p_c, point.p_t, point.score)?;
    }
    Ok(())
}

pub fn read_spectrum<R: Read>(reader: R) -> Result<Spectrum, SpectrumError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let got = csv_reader
        .headers()
        .map_err(IngestError::from)?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if got != SPECTRUM_HEADER {
        return Err(IngestError::BadHeader { expected: SPECTRUM_HEADER, got }.into());
    }
    let mut points = Vec::new();
    for record in csv_reader.records() {
        let record = record.map_err(IngestError::from)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad = |msg: &str| IngestError::BadRow { line, msg: msg.to_string() };
        let domain = record.get(0).ok_or_else(|| bad("missing domain"))?.to_string();
        let parse_f64 = |idx: usize, name: &str| -> Result<f64, IngestError> {
            record
                .get(idx)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad(&format!("`{name}` is not a number")))
        };
        points.push(SpectrumPoint {
            domain,
            p_c: parse_f64(1, "p_c")?,
            p_t: parse_f64(2, "p_t")?,
            score: parse_f64(3, "score")?,
        });
    }
    Spectrum::from_points(Vec::new(), points)
}
