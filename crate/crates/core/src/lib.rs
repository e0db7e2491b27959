//! Invocation graphs over web domains and their embedding in a data-induced
//! political spectrum.
//!
//! An invocation graph links domain `B` to domain `A` whenever users reply
//! to posts containing pages from `A` with pages from `B`; edge weights
//! count those reply pairs. This crate builds such graphs from aggregate
//! reply data, places domains on a spectrum derived from co-occurrence with
//! two anchor accounts, and measures how the links span that spectrum:
//!
//! * [`ingest`] — file formats and domain normalization
//! * [`graphbuild`] — filtering and seed-reachability construction
//! * [`spectrum`] — per-domain scores from co-occurrence data
//! * [`embedmetrics`] — out-link deviations, slopes, edge lengths,
//!   crossing profiles, in/out asymmetry
//! * [`nullmodels`] — degree-preserving rewiring, expected crossings,
//!   user shuffles, permutation tests
//! * [`align`] — two-dimensional spectrum alignment and rank correlation
//! * [`userlevel`] — reply-type trends between classified users
//! * [`synth`] — generators with planted structure for end-to-end checks

#![forbid(unsafe_code)]

pub mod align;
pub mod embedmetrics;
pub mod graphbuild;
pub mod ingest;
pub mod month;
pub mod nullmodels;
pub mod spectrum;
pub mod synth;
pub mod userlevel;

pub use align::{AlignmentResult, Norm};
pub use embedmetrics::{CrossingProfile, OutlinkStats, SlopeResult, WeightMode};
pub use graphbuild::{BuildConfig, InvocationGraph};
pub use ingest::{CoOccurrenceRecord, RedditComment, ReplyPairRecord, RetweetTotals};
pub use month::Month;
pub use nullmodels::{NullMethod, RewiredGraph, ShuffleScope};
pub use spectrum::{Spectrum, SpectrumPoint};
pub use userlevel::{InteractionWindow, UserSets};
