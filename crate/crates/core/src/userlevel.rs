//! User-to-user reply analysis on a discussion forum.
//!
//! Users are classified by which anchor subreddit they posted in (users
//! active in both are dropped). Replies within the forum between two
//! classified users are then counted by type over 30-day sliding windows,
//! and the same-side/cross-side ratio is tested against user-shuffle nulls.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use chrono::{DateTime, Days, NaiveDate};
use thiserror::Error;

use crate::embedmetrics::{ols, LineFit};
use crate::ingest::RedditComment;
use crate::nullmodels::{derive_seed, shuffle_users, ShuffleScope};

#[derive(Debug, Error)]
pub enum UserLevelError {
    #[error("window and step must be at least one day")]
    InvalidWindow,
    #[error("no classified reply pairs; the window range is empty")]
    EmptyDateRange,
    #[error("timestamp {0} is not a valid date")]
    BadTimestamp(i64),
    #[error("series has {0} usable points; need at least 2 for a trend")]
    DegenerateSeries(usize),
    #[error("shuffle trial {trial} produced a degenerate ratio series ({points} points)")]
    DegenerateNullTrial { trial: usize, points: usize },
    #[error("at least one trial is required")]
    ZeroTrials,
}

/// Users split by anchor-subreddit activity. The two sets are disjoint:
/// anyone who posted in both anchors belongs to neither.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserSets {
    clinton: std::collections::BTreeSet<String>,
    trump: std::collections::BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Clinton,
    Trump,
}

impl UserSets {
    pub fn clinton(&self) -> &std::collections::BTreeSet<String> {
        &self.clinton
    }

    pub fn trump(&self) -> &std::collections::BTreeSet<String> {
        &self.trump
    }

    fn side_of(&self, author: &str) -> Option<Side> {
        if self.clinton.contains(author) {
            Some(Side::Clinton)
        } else if self.trump.contains(author) {
            Some(Side::Trump)
        } else {
            None
        }
    }
}

/// Classify users by anchor-subreddit authorship over the whole dataset.
pub fn classify_users(
    comments: &[RedditComment],
    clinton_sub: &str,
    trump_sub: &str,
) -> UserSets {
    let mut in_clinton = std::collections::BTreeSet::new();
    let mut in_trump = std::collections::BTreeSet::new();
    for comment in comments {
        if comment.subreddit == clinton_sub {
            in_clinton.insert(comment.author.clone());
        } else if comment.subreddit == trump_sub {
            in_trump.insert(comment.author.clone());
        }
    }
    let clinton: std::collections::BTreeSet<String> =
        in_clinton.difference(&in_trump).cloned().collect();
    let trump: std::collections::BTreeSet<String> =
        in_trump.difference(&in_clinton).cloned().collect();
    UserSets { clinton, trump }
}

/// Reply counts by type over one sliding window ending at `end_date`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteractionWindow {
    pub end_date: NaiveDate,
    pub clinton_to_clinton: u64,
    pub clinton_to_trump: u64,
    pub trump_to_clinton: u64,
    pub trump_to_trump: u64,
}

impl InteractionWindow {
    pub fn total(&self) -> u64 {
        self.clinton_to_clinton
            + self.clinton_to_trump
            + self.trump_to_clinton
            + self.trump_to_trump
    }
}

#[derive(Debug, Clone)]
pub struct WindowConfig {
    pub window_days: u32,
    pub step_days: u32,
    /// Whether a user replying to their own comment counts as a same-side
    /// interaction.
    pub count_self_replies: bool,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig { window_days: 30, step_days: 1, count_self_replies: true }
    }
}

fn date_of(timestamp: i64) -> Result<NaiveDate, UserLevelError> {
    DateTime::from_timestamp(timestamp, 0)
        .map(|dt| dt.date_naive())
        .ok_or(UserLevelError::BadTimestamp(timestamp))
}

/// Count classified reply pairs per day. A reply contributes when its author
/// and the author of its parent are both classified and the parent record is
/// present in the dataset.
fn daily_counts(
    forum_comments: &[RedditComment],
    users: &UserSets,
    count_self_replies: bool,
) -> Result<BTreeMap<NaiveDate, [u64; 4]>, UserLevelError> {
    let author_by_id: HashMap<&str, &str> = forum_comments
        .iter()
        .map(|c| (c.id.as_str(), c.author.as_str()))
        .collect();
    let mut days: BTreeMap<NaiveDate, [u64; 4]> = BTreeMap::new();
    for comment in forum_comments {
        let Some(parent_id) = &comment.parent_id else { continue };
        let Some(&parent_author) = author_by_id.get(parent_id.as_str()) else { continue };
        if !count_self_replies && parent_author == comment.author {
            continue;
        }
        let (Some(from), Some(to)) = (users.side_of(&comment.author), users.side_of(parent_author))
        else {
            continue;
        };
        let slot = match (from, to) {
            (Side::Clinton, Side::Clinton) => 0,
            (Side::Clinton, Side::Trump) => 1,
            (Side::Trump, Side::Clinton) => 2,
            (Side::Trump, Side::Trump) => 3,
        };
        days.entry(date_of(comment.created)?).or_insert([0; 4])[slot] += 1;
    }
    Ok(days)
}

/// Sliding-window interaction counts. Each window covers the `window_days`
/// days ending at its `end_date` inclusive; end dates advance by `step_days`
/// from the first event date to `window_days - 1` days past the last one, so
/// every event appears in exactly `window_days / step_days` windows.
pub fn interaction_windows(
    forum_comments: &[RedditComment],
    users: &UserSets,
    cfg: &WindowConfig,
) -> Result<Vec<InteractionWindow>, UserLevelError> {
    if cfg.window_days == 0 || cfg.step_days == 0 {
        return Err(UserLevelError::InvalidWindow);
    }
    let days = daily_counts(forum_comments, users, cfg.count_self_replies)?;
    let (Some(first), Some(last)) = (days.keys().next(), days.keys().last()) else {
        return Err(UserLevelError::EmptyDateRange);
    };
    let first = *first;
    let final_end = last
        .checked_add_days(Days::new(cfg.window_days as u64 - 1))
        .ok_or(UserLevelError::EmptyDateRange)?;
    let mut windows = Vec::new();
    let mut end = first;
    while end <= final_end {
        let start = end
            .checked_sub_days(Days::new(cfg.window_days as u64 - 1))
            .ok_or(UserLevelError::EmptyDateRange)?;
        let mut counts = [0u64; 4];
        for (_, day) in days.range(start..=end) {
            for (slot, value) in day.iter().enumerate() {
                counts[slot] += value;
            }
        }
        windows.push(InteractionWindow {
            end_date: end,
            clinton_to_clinton: counts[0],
            clinton_to_trump: counts[1],
            trump_to_clinton: counts[2],
            trump_to_trump: counts[3],
        });
        end = end
            .checked_add_days(Days::new(cfg.step_days as u64))
            .ok_or(UserLevelError::EmptyDateRange)?;
    }
    Ok(windows)
}

/// Same-side over cross-side reply ratio per window. Windows with no
/// cross-side replies are omitted.
pub fn cross_cutting_ratio(windows: &[InteractionWindow]) -> Vec<(NaiveDate, f64)> {
    windows
        .iter()
        .filter_map(|w| {
            let same = w.clinton_to_clinton + w.trump_to_trump;
            let cross = w.clinton_to_trump + w.trump_to_clinton;
            (cross > 0).then(|| (w.end_date, same as f64 / cross as f64))
        })
        .collect()
}

/// Observed ratio-trend slope against user-shuffle nulls.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendSignificance {
    pub observed_slope: f64,
    pub null_slopes: Vec<f64>,
    pub min_null_slope: f64,
    pub observed_below_min: bool,
}

fn series_slope(series: &[(NaiveDate, f64)]) -> Option<LineFit> {
    let points: Vec<(f64, f64)> = series
        .iter()
        .map(|(date, ratio)| {
            (date.signed_duration_since(NaiveDate::MIN).num_days() as f64, *ratio)
        })
        .collect();
    ols(&points)
}

/// Test whether the observed ratio trend is steeper than chance: reassign
/// users to comments (keeping each user's comment count), recount windows
/// with the same classification, and compare slopes.
pub fn trend_significance(
    series: &[(NaiveDate, f64)],
    forum_comments: &[RedditComment],
    users: &UserSets,
    cfg: &WindowConfig,
    scope: ShuffleScope,
    trials: usize,
    rng_seed: u64,
) -> Result<TrendSignificance, UserLevelError> {
    if trials == 0 {
        return Err(UserLevelError::ZeroTrials);
    }
    let observed =
        series_slope(series).ok_or(UserLevelError::DegenerateSeries(series.len()))?;
    let mut null_slopes = Vec::with_capacity(trials);
    for trial in 0..trials {
        let shuffled = shuffle_users(forum_comments, scope, derive_seed(rng_seed, trial as u64));
        let windows = interaction_windows(&shuffled, users, cfg)?;
        let ratios = cross_cutting_ratio(&windows);
        let fit = series_slope(&ratios)
            .ok_or(UserLevelError::DegenerateNullTrial { trial, points: ratios.len() })?;
        null_slopes.push(fit.slope);
    }
    let min_null_slope = null_slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(TrendSignificance {
        observed_slope: observed.slope,
        observed_below_min: observed.slope < min_null_slope,
        min_null_slope,
        null_slopes,
    })
}

pub fn write_windows_csv<W: Write>(
    mut writer: W,
    windows: &[InteractionWindow],
) -> std::io::Result<()> {
    writeln!(writer, "end_date,n_cc,n_ct,n_tc,n_tt")?;
    for w in windows {
        writeln!(
            writer,
            "{},{},{},{},{}",
            w.end_date, w.clinton_to_clinton, w.clinton_to_trump, w.trump_to_clinton, w.trump_to_trump
        )?;
    }
    Ok(())
}

pub fn write_ratio_csv<W: Write>(
    mut writer: W,
    series: &[(NaiveDate, f64)],
) -> std::io::Result<()> {
    writeln!(writer, "end_date,ratio")?;
    for (date, ratio) in series {
        writeln!(writer, "{date},{ratio}")?;
    }
    Ok(())
}
