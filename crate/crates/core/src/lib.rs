//! Dimer entropy constants: optimal-truncation estimates from partial-sum
//! series, and exact dimer-covering counts on finite hypercubic boxes.
//!
//! The crate has two halves that meet in the [`verify`] suite.
//!
//! * [`series`], [`estimator`] and [`table`] work on sequences of partial
//!   sums `B_0, B_1, ..` of an asymptotic expansion. The estimator picks the
//!   successive pair with the smallest gap and reports its midpoint with the
//!   half-width `|B_g - B_{g+1}|`. Everything here is exact decimal
//!   arithmetic.
//! * [`lattice`], [`count`], [`precise`] and [`entropy`] count perfect
//!   matchings of `L_1 x .. x L_d` boxes exactly and turn them into
//!   finite-size entropies `ln(count) / V`, anchored by the exactly known
//!   square-lattice constant `G / pi`.
//!
//! ```
//! use dimer::{estimator::{optimal_truncation, ErrorPolicy}, table::builtin_series};
//!
//! let series = builtin_series(3).unwrap();
//! let est = optimal_truncation(&series, ErrorPolicy::AsIs).unwrap();
//! assert_eq!(est.g, 2);
//! assert_eq!(est.a.to_string(), "0.4531");
//! assert_eq!(est.b.to_string(), "0.0014");
//! ```

pub mod count;
pub mod entropy;
pub mod estimator;
pub mod lattice;
pub mod precise;
pub mod series;
pub mod table;
pub mod verify;

mod serde_util;

pub use count::{brute_force_count, transfer_matrix_count, CountConfig, CountError, MatchCount};
pub use entropy::{lambda_finite, lambda_scan, LambdaSample, ScanOutcome};
pub use estimator::{estimate_report, optimal_truncation, successive_gaps, ErrorPolicy, TruncationEstimate};
pub use lattice::{Boundary, LatticeSpec};
pub use precise::{kasteleyn_count_2d, lambda2_exact, Real};
pub use series::BSeries;
pub use table::{builtin_series, load_series, SeriesFormat, SeriesTable};
