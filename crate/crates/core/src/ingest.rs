//! Input parsing and domain normalization.
//!
//! Four file formats are supported, all UTF-8:
//! * `reply_pairs.csv` — header `month,src_domain,dst_domain,count`
//! * `cooccur.csv` — header `month,domain,n_clinton,n_trump`
//! * `retweets.csv` — header `month,clinton_total,trump_total`
//! * `comments.jsonl` — one JSON object per line with keys
//!   `id,parent_id,author,subreddit,created_utc,body` (`parent_id` optional)
//!
//! Plus `blacklist.txt`: one domain per line, `#` comments allowed.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read, Write};

use thiserror::Error;

use crate::month::Month;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot normalize domain from `{0}`")]
    BadDomain(String),
    #[error("expected header `{expected}`, got `{got}`")]
    BadHeader { expected: &'static str, got: String },
    #[error("line {line}: {msg}")]
    BadRow { line: u64, msg: String },
    #[error("line {line}: count must be positive, got {got}")]
    NonPositiveCount { line: u64, got: i64 },
    #[error("record {index}: missing or invalid field `{field}`")]
    MissingField { index: usize, field: &'static str },
    #[error("record {index}: not valid JSON: {msg}")]
    BadJson { index: usize, msg: String },
    #[error("record {index}: duplicate comment id `{id}`")]
    DuplicateId { index: usize, id: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// One aggregated count of tweet-reply pairs between two domains in a month.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReplyPairRecord {
    pub month: Month,
    pub src_domain: String,
    pub dst_domain: String,
    pub count: u64,
}

/// Same-day co-tweet counts of one domain with each anchor account.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoOccurrenceRecord {
    pub month: Month,
    pub domain: String,
    pub n_clinton: u64,
    pub n_trump: u64,
}

/// Monthly retweet totals of the two anchor accounts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetweetTotals {
    pub month: Month,
    pub clinton_total: u64,
    pub trump_total: u64,
}

/// One Reddit post or comment, with the canonical domains of any URLs found
/// in its body. `parent_id` is absent for top-level posts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedditComment {
    pub id: String,
    pub parent_id: Option<String>,
    pub author: String,
    pub subreddit: String,
    pub created: i64,
    pub domains: BTreeSet<String>,
}

/// Multi-part public suffixes for which the registrable domain keeps one
/// extra label. Deliberately small; covers the suffixes seen in practice in
/// news-domain data rather than the full registry.
const MULTI_PART_SUFFIXES: &[&str] = &[
    "ac.jp", "ac.uk", "co.il", "co.in", "co.jp", "co.kr", "co.nz", "co.th", "co.uk",
    "co.za", "com.ar", "com.au", "com.br", "com.cn", "com.hk", "com.mx", "com.my",
    "com.ph", "com.pk", "com.sg", "com.tr", "com.tw", "com.ua", "edu.au", "go.jp",
    "gov.au", "gov.br", "gov.cn", "gov.uk", "govt.nz", "me.uk", "ne.jp", "net.au",
    "net.br", "net.cn", "net.in", "net.nz", "net.uk", "or.jp", "or.kr", "org.au",
    "org.br", "org.cn", "org.il", "org.in", "org.mx", "org.nz", "org.uk", "org.za",
];

/// Reduce a URL or hostname to its canonical registrable domain.
///
/// Strips scheme, path, query, fragment, port, userinfo, and a leading
/// `www.`; lowercases; and keeps the public suffix plus one label
/// (`sub.blog.dailymail.co.uk/page` becomes `dailymail.co.uk`).
pub fn normalize_domain(raw: &str) -> Result<String, IngestError> {
    let reject = || IngestError::BadDomain(raw.to_string());
    let mut rest = raw.trim();
    if rest.is_empty() {
        return Err(reject());
    }
    if let Some(idx) = rest.find("://") {
        rest = &rest[idx + 3..];
    }
    // Authority ends at the first path, query, or fragment separator.
    if let Some(idx) = rest.find(['/', '?', '#']) {
        rest = &rest[..idx];
    }
    if let Some(idx) = rest.rfind('@') {
        rest = &rest[idx + 1..];
    }
    if let Some(idx) = rest.find(':') {
        rest = &rest[..idx];
    }
    let mut host = rest.trim_end_matches('.').to_ascii_lowercase();
    if let Some(stripped) = host.strip_prefix("www.") {
        // Keep "www" when it is the registrable label itself (e.g. www.com).
        if stripped.contains('.') {
            host = stripped.to_string();
        }
    }
    let labels: Vec<&str> = host.split('.').collect();
    if labels.len() < 2 {
        return Err(reject());
    }
    let valid_label = |l: &str| {
        !l.is_empty()
            && l.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
            && !l.starts_with('-')
            && !l.ends_with('-')
    };
    if !labels.iter().all(|l| valid_label(l)) {
        return Err(reject());
    }
    // All-numeric final label means an IP literal, not a domain.
    if labels[labels.len() - 1].bytes().all(|b| b.is_ascii_digit()) {
        return Err(reject());
    }
    let n = labels.len();
    let last_two = format!("{}.{}", labels[n - 2], labels[n - 1]);
    if MULTI_PART_SUFFIXES.binary_search(&last_two.as_str()).is_ok() {
        if n < 3 {
            return Err(reject()); // bare public suffix
        }
        Ok(format!("{}.{}", labels[n - 3], last_two))
    } else {
        Ok(last_two)
    }
}

pub const REPLY_PAIRS_HEADER: &str = "month,src_domain,dst_domain,count";
pub const COOCCUR_HEADER: &str = "month,domain,n_clinton,n_trump";
pub const RETWEETS_HEADER: &str = "month,clinton_total,trump_total";

fn check_header(
    reader: &mut csv::Reader<impl Read>,
    expected: &'static str,
) -> Result<(), IngestError> {
    let got = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if got != expected {
        return Err(IngestError::BadHeader { expected, got });
    }
    Ok(())
}

fn row_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn field<'r>(
    record: &'r csv::StringRecord,
    idx: usize,
    name: &str,
) -> Result<&'r str, IngestError> {
    record.get(idx).ok_or_else(|| IngestError::BadRow {
        line: row_line(record),
        msg: format!("missing column `{name}`"),
    })
}

fn parse_month_field(record: &csv::StringRecord, idx: usize) -> Result<Month, IngestError> {
    let raw = field(record, idx, "month")?;
    raw.parse().map_err(|e| IngestError::BadRow {
        line: row_line(record),
        msg: format!("{e}"),
    })
}

fn parse_count_field(
    record: &csv::StringRecord,
    idx: usize,
    name: &str,
) -> Result<u64, IngestError> {
    let raw = field(record, idx, name)?;
    raw.trim().parse().map_err(|_| IngestError::BadRow {
        line: row_line(record),
        msg: format!("`{name}` is not a non-negative integer: `{raw}`"),
    })
}

fn normalize_field(
    record: &csv::StringRecord,
    idx: usize,
    name: &str,
) -> Result<String, IngestError> {
    let raw = field(record, idx, name)?;
    normalize_domain(raw).map_err(|e| IngestError::BadRow {
        line: row_line(record),
        msg: format!("{e}"),
    })
}

/// Parse reply-pair rows, normalizing domains and summing duplicate
/// `(month, src, dst)` keys. Output is sorted, so the result does not depend
/// on input row order.
pub fn parse_reply_pairs<R: Read>(reader: R) -> Result<Vec<ReplyPairRecord>, IngestError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    check_header(&mut csv_reader, REPLY_PAIRS_HEADER)?;
    let mut totals: BTreeMap<(Month, String, String), u64> = BTreeMap::new();
    for record in csv_reader.records() {
        let record = record?;
        let line = row_line(&record);
        let month = parse_month_field(&record, 0)?;
        let src = normalize_field(&record, 1, "src_domain")?;
        let dst = normalize_field(&record, 2, "dst_domain")?;
        let raw_count = field(&record, 3, "count")?;
        let count: i64 = raw_count.trim().parse().map_err(|_| IngestError::BadRow {
            line,
            msg: format!("`count` is not an integer: `{raw_count}`"),
        })?;
        if count <= 0 {
            return Err(IngestError::NonPositiveCount { line, got: count });
        }
        *totals.entry((month, src, dst)).or_insert(0) += count as u64;
    }
    Ok(totals
        .into_iter()
        .map(|((month, src_domain, dst_domain), count)| ReplyPairRecord {
            month,
            src_domain,
            dst_domain,
            count,
        })
        .collect())
}

pub fn write_reply_pairs<W: Write>(
    mut writer: W,
    records: &[ReplyPairRecord],
) -> std::io::Result<()> {
    writeln!(writer, "{REPLY_PAIRS_HEADER}")?;
    for r in records {
        writeln!(writer, "{},{},{},{}", r.month, r.src_domain, r.dst_domain, r.count)?;
    }
    Ok(())
}

/// Parse co-occurrence rows; duplicate `(month, domain)` keys are summed.
pub fn parse_cooccurrence<R: Read>(reader: R) -> Result<Vec<CoOccurrenceRecord>, IngestError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    check_header(&mut csv_reader, COOCCUR_HEADER)?;
    let mut totals: BTreeMap<(Month, String), (u64, u64)> = BTreeMap::new();
    for record in csv_reader.records() {
        let record = record?;
        let month = parse_month_field(&record, 0)?;
        let domain = normalize_field(&record, 1, "domain")?;
        let n_clinton = parse_count_field(&record, 2, "n_clinton")?;
        let n_trump = parse_count_field(&record, 3, "n_trump")?;
        let entry = totals.entry((month, domain)).or_insert((0, 0));
        entry.0 += n_clinton;
        entry.1 += n_trump;
    }
    Ok(totals
        .into_iter()
        .map(|((month, domain), (n_clinton, n_trump))| CoOccurrenceRecord {
            month,
            domain,
            n_clinton,
            n_trump,
        })
        .collect())
}

pub fn write_cooccurrence<W: Write>(
    mut writer: W,
    records: &[CoOccurrenceRecord],
) -> std::io::Result<()> {
    writeln!(writer, "{COOCCUR_HEADER}")?;
    for r in records {
        writeln!(writer, "{},{},{},{}", r.month, r.domain, r.n_clinton, r.n_trump)?;
    }
    Ok(())
}

/// Parse monthly retweet totals; a month may appear at most once.
pub fn parse_retweet_totals<R: Read>(reader: R) -> Result<Vec<RetweetTotals>, IngestError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    check_header(&mut csv_reader, RETWEETS_HEADER)?;
    let mut totals: BTreeMap<Month, (u64, u64)> = BTreeMap::new();
    for record in csv_reader.records() {
        let record = record?;
        let line = row_line(&record);
        let month = parse_month_field(&record, 0)?;
        let clinton_total = parse_count_field(&record, 1, "clinton_total")?;
        let trump_total = parse_count_field(&record, 2, "trump_total")?;
        if totals.insert(month, (clinton_total, trump_total)).is_some() {
            return Err(IngestError::BadRow {
                line,
                msg: format!("duplicate month `{month}`"),
            });
        }
    }
    Ok(totals
        .into_iter()
        .map(|(month, (clinton_total, trump_total))| RetweetTotals {
            month,
            clinton_total,
            trump_total,
        })
        .collect())
}

pub fn write_retweet_totals<W: Write>(
    mut writer: W,
    records: &[RetweetTotals],
) -> std::io::Result<()> {
    writeln!(writer, "{RETWEETS_HEADER}")?;
    for r in records {
        writeln!(writer, "{},{},{}", r.month, r.clinton_total, r.trump_total)?;
    }
    Ok(())
}

/// Extract canonical domains from URLs embedded in free text.
///
/// Conservative scan: a URL starts at `http://` or `https://` (any case) and
/// ends at whitespace or closing punctuation. Tokens that do not normalize
/// to a domain are skipped.
pub fn extract_domains(body: &str) -> BTreeSet<String> {
    let mut domains = BTreeSet::new();
    let lower = body.to_ascii_lowercase();
    let bytes = body.as_bytes();
    let mut search_from = 0;
    while let Some(rel) = lower[search_from..].find("http") {
        let start = search_from + rel;
        let tail = &lower[start..];
        let scheme_len = if tail.starts_with("https://") {
            8
        } else if tail.starts_with("http://") {
            7
        } else {
            search_from = start + 4;
            continue;
        };
        let mut end = start + scheme_len;
        while end < bytes.len() {
            let c = bytes[end] as char;
            if c.is_whitespace() || matches!(c, ')' | ']' | '}' | '>' | '"' | '\'') {
                break;
            }
            end += 1;
        }
        let token = body[start..end].trim_end_matches(['.', ',', ';', ':', '!', '?']);
        if let Ok(domain) = normalize_domain(token) {
            domains.insert(domain);
        }
        search_from = end.max(start + 4);
    }
    domains
}

fn json_str(
    value: &serde_json::Value,
    key: &'static str,
    index: usize,
) -> Result<String, IngestError> {
    value
        .get(key)
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .ok_or(IngestError::MissingField { index, field: key })
}

/// Parse JSON-lines Reddit comments. Each line must carry `id`, `author`,
/// `subreddit`, `created_utc`, and `body`; `parent_id` is optional. URLs are
/// pulled out of `body` and deduplicated per comment.
pub fn parse_reddit_comments<R: Read>(reader: R) -> Result<Vec<RedditComment>, IngestError> {
    let buf = BufReader::new(reader);
    let mut comments = Vec::new();
    let mut seen_ids = BTreeSet::new();
    for (i, line) in buf.lines().enumerate() {
        let index = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| IngestError::BadJson {
                index,
                msg: e.to_string(),
            })?;
        let id = json_str(&value, "id", index)?;
        let author = json_str(&value, "author", index)?;
        let subreddit = json_str(&value, "subreddit", index)?;
        let body = json_str(&value, "body", index)?;
        let created = match value.get("created_utc") {
            Some(serde_json::Value::Number(n)) if n.as_i64().is_some() => n.as_i64().unwrap(),
            // pushshift dumps historically carried this as a string
            Some(serde_json::Value::String(s)) if s.trim().parse::<i64>().is_ok() => {
                s.trim().parse().unwrap()
            }
            _ => return Err(IngestError::MissingField { index, field: "created_utc" }),
        };
        let parent_id = match value.get("parent_id") {
            None | Some(serde_json::Value::Null) => None,
            Some(serde_json::Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(IngestError::MissingField { index, field: "parent_id" }),
        };
        if !seen_ids.insert(id.clone()) {
            return Err(IngestError::DuplicateId { index, id });
        }
        comments.push(RedditComment {
            id,
            parent_id,
            author,
            subreddit,
            created,
            domains: extract_domains(&body),
        });
    }
    Ok(comments)
}

/// Serialize comments as JSON lines. The body is reconstructed from the
/// extracted domains, so parsing the output yields the same records.
pub fn write_reddit_comments<W: Write>(
    mut writer: W,
    comments: &[RedditComment],
) -> std::io::Result<()> {
    for c in comments {
        let body = c
            .domains
            .iter()
            .map(|d| format!("https://{d}/"))
            .collect::<Vec<_>>()
            .join(" ");
        let mut obj = serde_json::Map::new();
        obj.insert("id".into(), c.id.clone().into());
        if let Some(parent) = &c.parent_id {
            obj.insert("parent_id".into(), parent.clone().into());
        }
        obj.insert("author".into(), c.author.clone().into());
        obj.insert("subreddit".into(), c.subreddit.clone().into());
        obj.insert("created_utc".into(), c.created.into());
        obj.insert("body".into(), body.into());
        writeln!(writer, "{}", serde_json::Value::Object(obj))?;
    }
    Ok(())
}

/// Parse a blacklist file: one domain per line, `#` starts a comment.
pub fn parse_blacklist<R: Read>(reader: R) -> Result<BTreeSet<String>, IngestError> {
    let buf = BufReader::new(reader);
    let mut domains = BTreeSet::new();
    for (i, line) in buf.lines().enumerate() {
        let line = line?;
        let entry = line.split('#').next().unwrap_or("").trim();
        if entry.is_empty() {
            continue;
        }
        let domain = normalize_domain(entry).map_err(|e| IngestError::BadRow {
            line: (i + 1) as u64,
            msg: format!("{e}"),
        })?;
        domains.insert(domain);
    }
    Ok(domains)
}
