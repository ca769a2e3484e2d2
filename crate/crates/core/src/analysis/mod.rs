//! How good the low-SNR approximations are, and how the decentralized solver
//! compares against the exact LP.

mod approx;
mod compare;
mod svg;

pub use approx::{
    interference_error, linearity_error, linearity_sweep, write_approximation_csv, write_interference_csv,
    ApproximationReport, ApproximationRow, InterferenceRow, REGIME_THRESHOLD,
};
pub use compare::{compare_methods, sweep, write_comparison_csv, ComparisonRow, SweepCell, SweepSpec, COMPARISON_HEADER};
pub use svg::{LineChart, Series};
