//! Batch CLI wiring the invocation-graph library into file-to-file runs.
//! Every subcommand reads CSV/JSONL inputs, writes plot-ready CSV (and
//! optional SVG) outputs, and records a manifest of digests and paths.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use invograph::align::{
    align_spectra, rank_by_score, read_rank_table, shuffled_alignment_baseline,
    write_alignment_csv, write_rank_table_csv, Norm,
};
use invograph::embedmetrics::{
    all_outlink_stats, asymmetry, crossing_profile, edge_length_histogram, slope,
    write_asymmetry_csv, write_length_histogram_csv, write_outlink_csv, write_slopes_csv,
    WeightMode,
};
use invograph::graphbuild::{
    aggregate_raw_graph, build_invocation_graph, default_blacklist, read_invocation_graph,
    write_edge_list, write_sidecar, BuildConfig, InvocationGraph,
};
use invograph::ingest::{
    parse_blacklist, parse_cooccurrence, parse_reddit_comments, parse_reply_pairs,
    parse_retweet_totals, write_cooccurrence, write_reddit_comments, write_reply_pairs,
    write_retweet_totals, RedditComment,
};
use invograph::month::parse_month_spec;
use invograph::nullmodels::{
    expected_crossing, permutation_test_spearman, write_crossing_with_null_csv, NullMethod,
    ShuffleScope,
};
use invograph::spectrum::{
    compute_engagement, compute_spectrum, read_spectrum, reddit_spectrum, write_spectrum,
    Spectrum,
};
use invograph::synth::{
    generate, generate_comments, write_ground_truth, CommentSynthConfig, SynthConfig,
};
use invograph::userlevel::{
    classify_users, cross_cutting_ratio, interaction_windows, trend_significance,
    write_ratio_csv, write_windows_csv, WindowConfig,
};

pub mod manifest;
pub mod svg;

use manifest::RunTracker;

#[derive(Debug, Parser)]
#[command(
    name = "invograph",
    about = "Build invocation graphs from reply data, embed them in a data-induced spectrum, and measure how links span it",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Minimum political engagement for a domain to enter a graph
    #[arg(long, global = true, default_value_t = 10_000)]
    pub engagement_threshold: u64,

    /// Minimum edge weight followed during seed reachability
    #[arg(long, global = true, default_value_t = 100)]
    pub edge_threshold: u64,

    /// Domain the reachability search starts from
    #[arg(long, global = true, default_value = "nytimes.com")]
    pub seed_domain: String,

    /// Months to analyze: `2016-01`, `2016-01..2016-09`, or a comma list
    #[arg(long, global = true, default_value = "2016-01..2016-09")]
    pub months: String,

    /// Seed for all randomized steps
    #[arg(long, global = true, default_value_t = 0)]
    pub rng_seed: u64,

    /// Aggregate by edge weight instead of edge count where both make sense
    #[arg(long, global = true)]
    pub weighted: bool,

    /// Directory all outputs and the run manifest are written to
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    /// Also render SVG charts next to the CSV outputs
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PeriodArg {
    /// Evaluate the engagement threshold per month
    Month,
    /// Evaluate it once over the whole month range
    Whole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NullArg {
    /// Closed-form expectation (weight mode)
    Analytic,
    /// Monte Carlo over explicit rewirings
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    Global,
    Monthly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L1,
    L2,
}

impl From<NormArg> for Norm {
    fn from(value: NormArg) -> Norm {
        match value {
            NormArg::L1 => Norm::L1,
            NormArg::L2 => Norm::L2,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one invocation graph per month from reply-pair data
    BuildGraph {
        /// CSV with header `month,src_domain,dst_domain,count`
        #[arg(long)]
        reply_pairs: PathBuf,
        /// CSV with header `month,domain,n_clinton,n_trump`
        #[arg(long)]
        cooccur: PathBuf,
        /// One blacklisted domain per line; defaults to the built-in list
        #[arg(long)]
        blacklist: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PeriodArg::Month)]
        engagement_period: PeriodArg,
    },
    /// Compute the two-axis spectrum and scalar scores, either from
    /// co-occurrence counts or from anchor-subreddit comments
    Spectrum {
        #[arg(long, requires = "retweets", conflicts_with = "comments")]
        cooccur: Option<PathBuf>,
        /// CSV with header `month,clinton_total,trump_total`
        #[arg(long, requires = "cooccur")]
        retweets: Option<PathBuf>,
        /// JSON-lines comment dump; scores come from anchor-subreddit rates
        #[arg(long)]
        comments: Option<PathBuf>,
        #[arg(long, default_value = "hillaryclinton")]
        clinton_sub: String,
        #[arg(long, default_value = "The_Donald")]
        trump_sub: String,
    },
    /// Out-link deviations per domain and the per-month slope
    Outlink {
        /// Graph edge-list CSV (sidecar JSON expected alongside); repeatable
        #[arg(long, required = true, num_args = 1..)]
        graph: Vec<PathBuf>,
        #[arg(long)]
        spectrum: PathBuf,
        /// Weight regression points by out-volume
        #[arg(long)]
        volume_weighted: bool,
    },
    /// Histogram of edge lengths on the spectrum
    EdgeLengths {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Count each edge once instead of by weight
        #[arg(long)]
        unweighted: bool,
    },
    /// Crossing functions with their rewired-baseline expectation
    Crossing {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        spectrum: PathBuf,
        /// `analytic` implies weight mode; `mc` follows --weighted
        #[arg(long, value_enum, default_value_t = NullArg::Analytic)]
        null: NullArg,
        /// Rewirings for the Monte Carlo null
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Inbound-ratio per domain and its regression on score
    Asymmetry {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        spectrum: PathBuf,
        /// Use edge counts instead of weights for degrees
        #[arg(long)]
        unweighted: bool,
    },
    /// Fit per-axis scales aligning one spectrum onto another
    Align {
        /// Spectrum CSV the source is scaled onto
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        source: PathBuf,
        #[arg(long, value_enum, default_value_t = NormArg::L2)]
        norm: NormArg,
        /// Also score the alignment against label-shuffled baselines
        #[arg(long, default_value_t = 0)]
        shuffle_trials: usize,
    },
    /// Rank two spectra side by side and test the rank correlation
    RankCompare {
        /// Ready-made ranking table `rank,domain_a,domain_b`
        #[arg(long, conflicts_with_all = ["spectrum_a", "spectrum_b"])]
        table: Option<PathBuf>,
        #[arg(long, requires = "spectrum_b")]
        spectrum_a: Option<PathBuf>,
        #[arg(long, requires = "spectrum_a")]
        spectrum_b: Option<PathBuf>,
        /// Shuffled orderings for the permutation test
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Reply-type counts, cross-cutting ratio, and shuffle significance
    UserTrends {
        /// JSON-lines comment dump
        #[arg(long)]
        comments: PathBuf,
        #[arg(long, default_value = "politics")]
        forum_sub: String,
        #[arg(long, default_value = "hillaryclinton")]
        clinton_sub: String,
        #[arg(long, default_value = "The_Donald")]
        trump_sub: String,
        #[arg(long, default_value_t = 30)]
        window_days: u32,
        #[arg(long, default_value_t = 1)]
        step_days: u32,
        /// User-shuffle trials for the slope significance test
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = ScopeArg::Global)]
        shuffle_scope: ScopeArg,
        #[arg(long)]
        exclude_self_replies: bool,
    },
    /// Generate synthetic datasets with planted structure
    Synth {
        #[arg(long, default_value_t = 20)]
        n_domains: usize,
        /// Positive: domains link near themselves; negative: across
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        homophily: f64,
        /// Extra multiplier on right-to-left edges (0 = none)
        #[arg(long, default_value_t = 0.0)]
        bias: f64,
        /// Base expected weight of a zero-distance edge
        #[arg(long, default_value_t = 200)]
        volume: u64,
        /// Also generate a synthetic comment stream
        #[arg(long)]
        comments: bool,
        #[arg(long, default_value_t = 40)]
        users_per_side: usize,
        #[arg(long, default_value_t = 90)]
        days: u32,
        #[arg(long, default_value_t = 40)]
        replies_per_day: u32,
        /// Cross-side reply share on the first day
        #[arg(long, default_value_t = 0.2)]
        cross_start: f64,
        /// Cross-side reply share on the last day
        #[arg(long, default_value_t = 0.7)]
        cross_end: f64,
        #[arg(long, default_value = "2016-01-01")]
        start_date: String,
    },
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn load_spectrum(tracker: &mut RunTracker, path: &Path) -> Result<Spectrum> {
    tracker.input(path)?;
    read_spectrum(open(path)?).with_context(|| format!("reading spectrum {}", path.display()))
}

fn load_graph(tracker: &mut RunTracker, path: &Path) -> Result<InvocationGraph> {
    let sidecar = path.with_extension("json");
    tracker.input(path)?;
    tracker.input(&sidecar)?;
    read_invocation_graph(open(path)?, open(&sidecar)?)
        .with_context(|| format!("reading graph {}", path.display()))
}

fn load_comments(tracker: &mut RunTracker, path: &Path) -> Result<Vec<RedditComment>> {
    tracker.input(path)?;
    parse_reddit_comments(open(path)?)
        .with_context(|| format!("reading comments {}", path.display()))
}

pub fn run(cli: Cli) -> Result<()> {
    let months = parse_month_spec(&cli.months)?;
    let mut tracker = RunTracker::new(&cli.out_dir)?;
    match &cli.command {
        Command::BuildGraph { reply_pairs, cooccur, blacklist, engagement_period } => {
            tracker.input(reply_pairs)?;
            let records = parse_reply_pairs(open(reply_pairs)?)
                .with_context(|| format!("reading {}", reply_pairs.display()))?;
            tracker.input(cooccur)?;
            let cooccurrence = parse_cooccurrence(open(cooccur)?)
                .with_context(|| format!("reading {}", cooccur.display()))?;
            let blacklist_set = match blacklist {
                Some(path) => {
                    tracker.input(path)?;
                    parse_blacklist(open(path)?)?
                }
                None => default_blacklist(),
            };
            let config = BuildConfig {
                engagement_threshold: cli.engagement_threshold,
                edge_threshold: cli.edge_threshold,
                seed_domain: cli.seed_domain.clone(),
                blacklist: blacklist_set,
            };
            let whole_period_engagement: BTreeMap<String, u64> =
                compute_engagement(&cooccurrence, &months);
            for &month in &months {
                let raw = aggregate_raw_graph(&records, month);
                let engagement = match engagement_period {
                    PeriodArg::Whole => whole_period_engagement.clone(),
                    PeriodArg::Month => compute_engagement(&cooccurrence, &[month]),
                };
                let graph = build_invocation_graph(&raw, &engagement, &config)
                    .with_context(|| format!("building graph for {month}"))?;
                write_edge_list(tracker.create(&format!("graph_{month}.csv"))?, &graph)?;
                write_sidecar(
                    tracker.create(&format!("graph_{month}.json"))?,
                    &graph,
                    Some(&config),
                )?;
                println!(
                    "{month}: {} domains, {} edges, total weight {}",
                    graph.node_count(),
                    graph.edge_count(),
                    graph.total_weight()
                );
            }
            tracker.finish(
                "build-graph",
                json!({
                    "months": months.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                    "engagement_threshold": cli.engagement_threshold,
                    "edge_threshold": cli.edge_threshold,
                    "seed_domain": cli.seed_domain,
                    "engagement_period": format!("{engagement_period:?}").to_lowercase(),
                }),
            )
        }
        Command::Spectrum { cooccur, retweets, comments, clinton_sub, trump_sub } => {
            let (spectrum, source) = match (cooccur, retweets, comments) {
                (Some(cooccur), Some(retweets), None) => {
                    tracker.input(cooccur)?;
                    let cooccurrence = parse_cooccurrence(open(cooccur)?)?;
                    tracker.input(retweets)?;
                    let totals = parse_retweet_totals(open(retweets)?)?;
                    (compute_spectrum(&cooccurrence, &totals, &months)?, "cooccurrence")
                }
                (None, None, Some(comments)) => {
                    let stream = load_comments(&mut tracker, comments)?;
                    (reddit_spectrum(&stream, clinton_sub, trump_sub)?, "comments")
                }
                _ => bail!("provide either --cooccur with --retweets, or --comments"),
            };
            write_spectrum(tracker.create("spectrum.csv")?, &spectrum)?;
            if cli.svg {
                let points: Vec<(f64, f64)> =
                    spectrum.iter().map(|p| (p.p_c, p.p_t)).collect();
                svg::chart(
                    tracker.create("spectrum.svg")?,
                    "co-occurrence spectrum",
                    &[svg::Series {
                        label: "domains",
                        color: "steelblue",
                        kind: svg::SeriesKind::Scatter,
                        points,
                    }],
                )?;
            }
            println!("spectrum over {} domains", spectrum.len());
            tracker.finish(
                "spectrum",
                json!({
                    "source": source,
                    "months": if source == "cooccurrence" {
                        Some(months.iter().map(|m| m.to_string()).collect::<Vec<_>>())
                    } else {
                        None
                    },
                    "clinton_sub": if source == "comments" { Some(clinton_sub) } else { None },
                    "trump_sub": if source == "comments" { Some(trump_sub) } else { None },
                }),
            )
        }
        Command::Outlink { graph, spectrum, volume_weighted } => {
            let spectrum_data = load_spectrum(&mut tracker, spectrum)?;
            let mut slopes = Vec::new();
            for path in graph {
                let g = load_graph(&mut tracker, path)?;
                let stats = all_outlink_stats(&g, &spectrum_data)?;
                let month = g.month();
                write_outlink_csv(
                    tracker.create(&format!("outlink_{month}.csv"))?,
                    &spectrum_data,
                    &stats,
                )?;
                if cli.svg {
                    let points: Vec<(f64, f64)> = stats
                        .iter()
                        .map(|s| (spectrum_data.score(&s.domain).unwrap(), s.deviation))
                        .collect();
                    svg::chart(
                        tracker.create(&format!("outlink_{month}.svg"))?,
                        &format!("out-link deviation vs score, {month}"),
                        &[svg::Series {
                            label: "domains",
                            color: "steelblue",
                            kind: svg::SeriesKind::Scatter,
                            points,
                        }],
                    )?;
                }
                let fit = slope(&g, &spectrum_data, *volume_weighted)?;
                println!("{month}: slope {:.6} over {} domains", fit.slope, fit.n_points);
                slopes.push(fit);
            }
            slopes.sort_by_key(|s| s.month);
            write_slopes_csv(tracker.create("slopes.csv")?, &slopes)?;
            tracker.finish(
                "outlink",
                json!({
                    "volume_weighted": volume_weighted,
                    "graphs": graph.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                }),
            )
        }
        Command::EdgeLengths { graph, spectrum, bins, unweighted } => {
            let spectrum_data = load_spectrum(&mut tracker, spectrum)?;
            let g = load_graph(&mut tracker, graph)?;
            let mode = if *unweighted { WeightMode::Count } else { WeightMode::Weight };
            let histogram = edge_length_histogram(&g, &spectrum_data, *bins, mode)?;
            let month = g.month();
            write_length_histogram_csv(
                tracker.create(&format!("edge_lengths_{month}.csv"))?,
                &histogram,
            )?;
            if cli.svg {
                svg::bars(
                    tracker.create(&format!("edge_lengths_{month}.svg"))?,
                    &format!("edge lengths, {month}"),
                    &histogram.mass,
                )?;
            }
            tracker.finish(
                "edge-lengths",
                json!({ "bins": bins, "unweighted": unweighted, "month": month.to_string() }),
            )
        }
        Command::Crossing { graph, spectrum, null, trials } => {
            let spectrum_data = load_spectrum(&mut tracker, spectrum)?;
            let g = load_graph(&mut tracker, graph)?;
            let (mode, method) = match null {
                NullArg::Analytic => (WeightMode::Weight, NullMethod::Analytic),
                NullArg::Mc => (
                    if cli.weighted { WeightMode::Weight } else { WeightMode::Count },
                    NullMethod::MonteCarlo { trials: *trials, rng_seed: cli.rng_seed },
                ),
            };
            let observed = crossing_profile(&g, &spectrum_data, mode)?;
            let expected = expected_crossing(&g, &spectrum_data, mode, method)?;
            let month = g.month();
            write_crossing_with_null_csv(
                tracker.create(&format!("crossing_{month}.csv"))?,
                &observed,
                &expected.profile,
            )?;
            if cli.svg {
                let steps = |values: &[f64], profile: &invograph::CrossingProfile| {
                    profile
                        .breakpoints()
                        .windows(2)
                        .zip(values)
                        .flat_map(|(w, &v)| [(w[0], v), (w[1], v)])
                        .collect::<Vec<_>>()
                };
                svg::chart(
                    tracker.create(&format!("crossing_{month}.svg"))?,
                    &format!("crossing functions, {month}"),
                    &[
                        svg::Series {
                            label: "rightward",
                            color: "firebrick",
                            kind: svg::SeriesKind::Line,
                            points: steps(observed.rightward(), &observed),
                        },
                        svg::Series {
                            label: "leftward",
                            color: "steelblue",
                            kind: svg::SeriesKind::Line,
                            points: steps(observed.leftward(), &observed),
                        },
                        svg::Series {
                            label: "rightward null",
                            color: "salmon",
                            kind: svg::SeriesKind::Line,
                            points: steps(expected.profile.rightward(), &expected.profile),
                        },
                        svg::Series {
                            label: "leftward null",
                            color: "skyblue",
                            kind: svg::SeriesKind::Line,
                            points: steps(expected.profile.leftward(), &expected.profile),
                        },
                    ],
                )?;
            }
            tracker.finish(
                "crossing",
                json!({
                    "null": format!("{null:?}").to_lowercase(),
                    "trials": if matches!(null, NullArg::Mc) { Some(trials) } else { None },
                    "mode": format!("{mode:?}").to_lowercase(),
                    "rng_seed": cli.rng_seed,
                    "month": month.to_string(),
                }),
            )
        }
        Command::Asymmetry { graph, spectrum, unweighted } => {
            let spectrum_data = load_spectrum(&mut tracker, spectrum)?;
            let g = load_graph(&mut tracker, graph)?;
            let mode = if *unweighted { WeightMode::Count } else { WeightMode::Weight };
            let report = asymmetry(&g, &spectrum_data, mode)?;
            let month = g.month();
            write_asymmetry_csv(
                tracker.create(&format!("asymmetry_{month}.csv"))?,
                &spectrum_data,
                &report,
            )?;
            if cli.svg {
                let points: Vec<(f64, f64)> = report
                    .stats
                    .iter()
                    .map(|s| (spectrum_data.score(&s.domain).unwrap(), s.inbound_ratio))
                    .collect();
                svg::chart(
                    tracker.create(&format!("asymmetry_{month}.svg"))?,
                    &format!("inbound ratio vs score, {month}"),
                    &[svg::Series {
                        label: "domains",
                        color: "steelblue",
                        kind: svg::SeriesKind::Scatter,
                        points,
                    }],
                )?;
            }
            match report.fit {
                Some(fit) => println!("{month}: inbound-ratio slope {:.6}", fit.slope),
                None => println!("{month}: inbound-ratio slope undefined"),
            }
            tracker.finish(
                "asymmetry",
                json!({
                    "mode": format!("{mode:?}").to_lowercase(),
                    "month": month.to_string(),
                    "slope": report.fit.map(|f| f.slope),
                }),
            )
        }
        Command::Align { target, source, norm, shuffle_trials } => {
            let target_spectrum = load_spectrum(&mut tracker, target)?;
            let source_spectrum = load_spectrum(&mut tracker, source)?;
            let result = align_spectra(&target_spectrum, &source_spectrum, (*norm).into())?;
            write_alignment_csv(
                tracker.create("alignment.csv")?,
                &target_spectrum,
                &source_spectrum,
                &result,
            )?;
            println!(
                "scales: c-axis {:.6}, t-axis {:.6}; objective {:.6e} over {} domains",
                result.scale_c,
                result.scale_t,
                result.objective,
                result.residuals.len()
            );
            if cli.svg {
                let target_points: Vec<(f64, f64)> = result
                    .residuals
                    .keys()
                    .map(|d| {
                        let p = target_spectrum.get(d).unwrap();
                        (p.p_c, p.p_t)
                    })
                    .collect();
                let scaled_points: Vec<(f64, f64)> = result
                    .residuals
                    .keys()
                    .map(|d| {
                        let p = source_spectrum.get(d).unwrap();
                        (result.scale_c * p.p_c, result.scale_t * p.p_t)
                    })
                    .collect();
                svg::chart(
                    tracker.create("alignment.svg")?,
                    "aligned spectra",
                    &[
                        svg::Series {
                            label: "target",
                            color: "firebrick",
                            kind: svg::SeriesKind::Scatter,
                            points: target_points,
                        },
                        svg::Series {
                            label: "source (scaled)",
                            color: "steelblue",
                            kind: svg::SeriesKind::Scatter,
                            points: scaled_points,
                        },
                    ],
                )?;
            }
            let mut baseline_quantile = None;
            if *shuffle_trials > 0 {
                let baseline = shuffled_alignment_baseline(
                    &target_spectrum,
                    &source_spectrum,
                    (*norm).into(),
                    *shuffle_trials,
                    cli.rng_seed,
                )?;
                let mut out = tracker.create("alignment_null.csv")?;
                use std::io::Write;
                writeln!(out, "trial,objective")?;
                for (i, objective) in baseline.null_objectives.iter().enumerate() {
                    writeln!(out, "{i},{objective}")?;
                }
                println!(
                    "real objective {:.6e}; {:.1}% of {} shuffles do as well",
                    baseline.real_objective,
                    100.0 * baseline.fraction_leq,
                    shuffle_trials
                );
                baseline_quantile = Some(baseline.fraction_leq);
            }
            tracker.finish(
                "align",
                json!({
                    "norm": format!("{norm:?}").to_lowercase(),
                    "shuffle_trials": shuffle_trials,
                    "rng_seed": cli.rng_seed,
                    "scale_c": result.scale_c,
                    "scale_t": result.scale_t,
                    "objective": result.objective,
                    "baseline_quantile": baseline_quantile,
                }),
            )
        }
        Command::RankCompare { table, spectrum_a, spectrum_b, trials } => {
            let (order_a, order_b) = match (table, spectrum_a, spectrum_b) {
                (Some(path), _, _) => {
                    tracker.input(path)?;
                    read_rank_table(open(path)?)?
                }
                (None, Some(a), Some(b)) => {
                    let spec_a = load_spectrum(&mut tracker, a)?;
                    let spec_b = load_spectrum(&mut tracker, b)?;
                    let in_b: std::collections::BTreeSet<&str> = spec_b.domains().collect();
                    let shared: std::collections::BTreeSet<String> = spec_a
                        .domains()
                        .filter(|d| in_b.contains(d))
                        .map(str::to_string)
                        .collect();
                    let restrict = |order: Vec<String>| -> Vec<String> {
                        order.into_iter().filter(|d| shared.contains(d)).collect()
                    };
                    (restrict(rank_by_score(&spec_a)?), restrict(rank_by_score(&spec_b)?))
                }
                _ => bail!("provide either --table or both --spectrum-a and --spectrum-b"),
            };
            write_rank_table_csv(tracker.create("rank_table.csv")?, &order_a, &order_b)?;
            let test = permutation_test_spearman(&order_a, &order_b, *trials, cli.rng_seed)?;
            println!(
                "spearman rho = {:.4} over {} items; max of {} shuffles = {:.4}; fraction >= observed = {}",
                test.observed,
                order_a.len(),
                test.trials,
                test.null_max,
                test.fraction_geq
            );
            tracker.finish(
                "rank-compare",
                json!({
                    "trials": trials,
                    "rng_seed": cli.rng_seed,
                    "observed_rho": test.observed,
                    "null_max": test.null_max,
                    "fraction_geq": test.fraction_geq,
                }),
            )
        }
        Command::UserTrends {
            comments,
            forum_sub,
            clinton_sub,
            trump_sub,
            window_days,
            step_days,
            trials,
            shuffle_scope,
            exclude_self_replies,
        } => {
            let all_comments = load_comments(&mut tracker, comments)?;
            let users = classify_users(&all_comments, clinton_sub, trump_sub);
            let forum: Vec<RedditComment> = all_comments
                .iter()
                .filter(|c| &c.subreddit == forum_sub)
                .cloned()
                .collect();
            let cfg = WindowConfig {
                window_days: *window_days,
                step_days: *step_days,
                count_self_replies: !exclude_self_replies,
            };
            let windows = interaction_windows(&forum, &users, &cfg)?;
            write_windows_csv(tracker.create("user_windows.csv")?, &windows)?;
            let series = cross_cutting_ratio(&windows);
            write_ratio_csv(tracker.create("user_ratio.csv")?, &series)?;
            if cli.svg {
                let points: Vec<(f64, f64)> = series
                    .iter()
                    .enumerate()
                    .map(|(i, (_, ratio))| (i as f64, *ratio))
                    .collect();
                svg::chart(
                    tracker.create("user_ratio.svg")?,
                    "same-side over cross-side replies",
                    &[svg::Series {
                        label: "ratio",
                        color: "firebrick",
                        kind: svg::SeriesKind::Line,
                        points,
                    }],
                )?;
            }
            let scope = match shuffle_scope {
                ScopeArg::Global => ShuffleScope::Global,
                ScopeArg::Monthly => ShuffleScope::Monthly,
            };
            let significance = trend_significance(
                &series,
                &forum,
                &users,
                &cfg,
                scope,
                *trials,
                cli.rng_seed,
            )?;
            let trend = json!({
                "observed_slope": significance.observed_slope,
                "min_null_slope": significance.min_null_slope,
                "observed_below_min": significance.observed_below_min,
                "trials": trials,
                "scope": format!("{shuffle_scope:?}").to_lowercase(),
                "null_slopes": significance.null_slopes,
            });
            serde_json::to_writer_pretty(tracker.create("trend_significance.json")?, &trend)?;
            println!(
                "observed slope {:.6e}; min of {} null slopes {:.6e}; below min: {}",
                significance.observed_slope,
                trials,
                significance.min_null_slope,
                significance.observed_below_min
            );
            tracker.finish(
                "user-trends",
                json!({
                    "forum_sub": forum_sub,
                    "clinton_sub": clinton_sub,
                    "trump_sub": trump_sub,
                    "window_days": window_days,
                    "step_days": step_days,
                    "trials": trials,
                    "scope": format!("{shuffle_scope:?}").to_lowercase(),
                    "exclude_self_replies": exclude_self_replies,
                    "rng_seed": cli.rng_seed,
                    "classified_users": [users.clinton().len(), users.trump().len()],
                }),
            )
        }
        Command::Synth {
            n_domains,
            homophily,
            bias,
            volume,
            comments,
            users_per_side,
            days,
            replies_per_day,
            cross_start,
            cross_end,
            start_date,
        } => {
            let cfg = SynthConfig {
                n_domains: *n_domains,
                homophily: *homophily,
                right_to_left_bias: *bias,
                volume_scale: *volume,
                months: months.clone(),
                rng_seed: cli.rng_seed,
            };
            let output = generate(&cfg)?;
            write_reply_pairs(tracker.create("reply_pairs.csv")?, &output.reply_pairs)?;
            write_cooccurrence(tracker.create("cooccur.csv")?, &output.cooccurrence)?;
            write_retweet_totals(tracker.create("retweets.csv")?, &output.retweet_totals)?;
            write_ground_truth(tracker.create("ground_truth.csv")?, &output.ground_truth)?;
            println!(
                "{} domains, {} reply-pair rows over {} months",
                n_domains,
                output.reply_pairs.len(),
                months.len()
            );
            if *comments {
                let comment_cfg = CommentSynthConfig {
                    clinton_users: *users_per_side,
                    trump_users: *users_per_side,
                    days: *days,
                    replies_per_day: *replies_per_day,
                    cross_share_start: *cross_start,
                    cross_share_end: *cross_end,
                    start_date: start_date
                        .parse::<chrono::NaiveDate>()
                        .with_context(|| format!("invalid --start-date `{start_date}`"))?,
                    rng_seed: cli.rng_seed,
                    ..CommentSynthConfig::default()
                };
                let stream = generate_comments(&comment_cfg)?;
                write_reddit_comments(tracker.create("comments.jsonl")?, &stream)?;
                println!("{} synthetic comments", stream.len());
            }
            tracker.finish(
                "synth",
                json!({
                    "n_domains": n_domains,
                    "homophily": homophily,
                    "bias": bias,
                    "volume": volume,
                    "months": months.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                    "rng_seed": cli.rng_seed,
                    "comments": comments,
                    "users_per_side": users_per_side,
                    "days": days,
                    "replies_per_day": replies_per_day,
                    "cross_start": cross_start,
                    "cross_end": cross_end,
                    "start_date": start_date,
                }),
            )
        }
    }
}
