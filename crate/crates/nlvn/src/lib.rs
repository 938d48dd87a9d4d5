//! Scenario runner, figure-data generator and self-check suite built on
//! `nlvn-core`. The `nlvn` binary is a thin argument-parsing layer over
//! these modules.

#![deny(rust_2018_idioms)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod figure;
pub mod run;
pub mod scenario;
pub mod sweep;
pub mod table;
pub mod verify;

pub use error::{CliError, CliResult};
pub use figure::FigureJob;
pub use run::{run_scenario, RunSummary, OUT_DIR_ENV};
pub use scenario::{parse_complex, Scenario};
pub use table::Table;
pub use verify::{verify_suite, Level, VerifyOptions, VerifyReport};
