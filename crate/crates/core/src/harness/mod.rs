//! s-sweeps towards the local problem, gamma checks on fixed discrete
//! functions, and report output.

mod config;
mod report;
mod sweeps;

pub use config::{read_config, Format, Mode, PotentialSpec, SweepConfig, DEFAULT_S_GRID, KEYS};
pub use report::{emit_report, Check, GammaRecord, SweepRecord, SweepReport, CSV_HEADER};
pub use sweeps::{
    development_defects, gamma_test_pair, run, run_eigen_sweep, run_gamma_checks, run_groundstate_sweep,
    BISECTION_AGREEMENT, DEVELOPMENT_STEPS, GAP_CHECK_FROM, LEVEL_TOLERANCE, NEHARI_TOLERANCE, REFERENCE_TOLERANCE, VNORM_ENVELOPE,
};
