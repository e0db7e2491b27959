use clap::Parser;

use invograph::align::AlignError;
use invograph::graphbuild::BuildError;
use invograph::ingest::IngestError;
use invograph::month::MonthError;
use invograph::nullmodels::NullModelError;
use invograph::spectrum::SpectrumError;
use invograph::synth::SynthError;
use invograph::userlevel::UserLevelError;

/// Failure classes with distinct exit codes: parse errors (2), violated
/// preconditions (3), degenerate data (4), anything else (1).
fn classify(error: &anyhow::Error) -> (&'static str, i32) {
    for cause in error.chain() {
        if let Some(e) = cause.downcast_ref::<IngestError>() {
            return match e {
                IngestError::Io(_) => ("io", 1),
                _ => ("parse", 2),
            };
        }
        if cause.downcast_ref::<MonthError>().is_some() {
            return ("parse", 2);
        }
        if let Some(e) = cause.downcast_ref::<BuildError>() {
            return match e {
                BuildError::Ingest(_) | BuildError::Sidecar(_) => ("parse", 2),
                BuildError::Io(_) => ("io", 1),
                _ => ("precondition", 3),
            };
        }
        if let Some(e) = cause.downcast_ref::<SpectrumError>() {
            return match e {
                SpectrumError::Ingest(_) | SpectrumError::InvalidPoint { .. } => ("parse", 2),
                _ => ("precondition", 3),
            };
        }
        if let Some(e) = cause.downcast_ref::<invograph::embedmetrics::MetricsError>() {
            use invograph::embedmetrics::MetricsError::*;
            return match e {
                NoOutLinks(_) | EmptyBaseline(_) | TooFewPoints { .. } | DegenerateScores => {
                    ("degenerate data", 4)
                }
                _ => ("precondition", 3),
            };
        }
        if let Some(e) = cause.downcast_ref::<NullModelError>() {
            return match e {
                NullModelError::ZeroTotalWeight => ("degenerate data", 4),
                _ => ("precondition", 3),
            };
        }
        if let Some(e) = cause.downcast_ref::<AlignError>() {
            return match e {
                AlignError::Ingest(_) | AlignError::DuplicateItem(_) => ("parse", 2),
                AlignError::NoCommonDomains
                | AlignError::TiedScores(_, _)
                | AlignError::ZeroVector
                | AlignError::TooFewItems { .. } => ("degenerate data", 4),
                _ => ("precondition", 3),
            };
        }
        if let Some(e) = cause.downcast_ref::<UserLevelError>() {
            return match e {
                UserLevelError::BadTimestamp(_) => ("parse", 2),
                UserLevelError::EmptyDateRange
                | UserLevelError::DegenerateSeries(_)
                | UserLevelError::DegenerateNullTrial { .. } => ("degenerate data", 4),
                _ => ("precondition", 3),
            };
        }
        if cause.downcast_ref::<SynthError>().is_some() {
            return ("precondition", 3);
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return ("io", 1);
        }
    }
    ("error", 1)
}

fn main() {
    let cli = invograph_cli::Cli::parse();
    if let Err(error) = invograph_cli::run(cli) {
        let (class, code) = classify(&error);
        eprintln!("error ({class}): {error:#}");
        std::process::exit(code);
    }
}
