//! Instance generators, exact oracles and the experiment runner.

mod experiment;
mod generators;
mod oracle;

pub use experiment::{
    deterministic_env, generate, run_experiment, run_instance, Aggregates, ExperimentReport, GeneratorSpec,
    InstanceRecord, InstanceSpec, SolverOutcome, CSV_HEADER,
};
pub use generators::{
    blowup_audit_params, gen_blowup, gen_cover_instance, gen_random_condition, singleton_partition,
    standard_blowup_frame, Blowup, BLOWUP_RETRIES,
};
pub use oracle::{brute_force_hamiltonian, max_cycle_cover_coverage, BRUTE_FORCE_LIMIT, COVERAGE_LIMIT};
