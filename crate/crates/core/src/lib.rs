//! Tests for causal effects in either direction between two traits from
//! two-sample GWAS summary statistics.
//!
//! For each direction, SNPs strongly associated with the exposure but with a
//! small outcome association form a *focused set*. The IVW estimate on that
//! set has a known null distribution built from truncated-normal moments, so
//! the test keeps its size when many instruments are pleiotropic.
//!
//! ```
//! use focusmr::{test_direction, Direction, FocusConfig, FocusedEstimator, Panel, SnpRecord};
//!
//! let panel = Panel::new(vec![
//!     SnpRecord::new("rs1", 0.30, 0.02, 0.001, 0.02),
//!     SnpRecord::new("rs2", -0.25, 0.02, 0.010, 0.02),
//!     SnpRecord::new("rs3", 0.40, 0.02, -0.004, 0.02),
//! ])
//! .unwrap();
//! let report = test_direction(&panel, Direction::DtoY, &FocusConfig::default(), FocusedEstimator::FocusedIvw).unwrap();
//! assert!(!report.reject);
//! ```

pub mod benchmarks;
pub mod cli;
pub mod direction;
pub mod error;
pub mod focusing;
pub mod io;
pub mod model;
pub mod panel;
pub mod simulation;
pub mod stats;
pub mod truncnorm;

pub use benchmarks::{run_benchmark, BenchmarkMethod, BenchmarkReport};
pub use direction::Direction;
pub use error::{Error, Result};
pub use focusing::{
    focused_set, power_forecast, test_direction, test_joint_null, FocusConfig, FocusedEstimator,
    JointReport, PowerForecast, ScreeningThreshold, TestReport,
};
pub use model::{diagnose_identification, reduced_form, DiagnosticsReport, TruthConfig};
pub use panel::{Panel, SnpRecord};
pub use simulation::{run_scenario, Method, ScenarioConfig, ScenarioReport, SeedEffects};
pub use truncnorm::{truncnorm_mean, truncnorm_var, TruncSpec};
