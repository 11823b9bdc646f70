//! Benchmark pairs, the NRMSE metric and the repeated-seed experiment runners.

mod functions;
mod metric;
mod runner;

pub use functions::{find, registry, BenchmarkPair};
pub use metric::nrmse;
pub use runner::{
    default_lf_grid, emit_correlation_scatter, run_baselines, run_experiment, run_hf_sweep,
    run_lf_sweep, write_runs_csv, write_scatter_csv, write_summary_csv, write_summary_json,
    Comparison, ExperimentResult, Protocol, RunRecord, Variant, DEFAULT_REPEATS,
    DEFAULT_TEST_SIZE,
};

pub mod pairs {
    //! Raw response functions of the registered pairs.
    pub use super::functions::{
        borehole_hf, borehole_lf, currin_hf, currin_lf, forrester_hf, forrester_lf, hartmann6_hf,
        hartmann6_lf, nonlinear_hf, nonlinear_lf, phase_hf, phase_lf, separable_hf, separable_lf,
    };
}
