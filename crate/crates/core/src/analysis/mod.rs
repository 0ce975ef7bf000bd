//! Coverage, artifact diffs, embedding norm statistics and evaluation
//! arithmetic.

mod coverage;
mod diff;
mod metrics;
mod norms;

pub use coverage::{coverage, coverage_text, CoverageStats};
pub use diff::{vocab_diff, VocabDiff};
pub use metrics::{effort, effort_ratio, err, err_table_csv, rescale, EffortMetric, ErrRow, MetricKind};
pub use norms::{norm_stats, NormStats};
