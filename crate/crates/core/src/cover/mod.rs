//! Covering a reduced digraph by disjoint cycles: inherited degree checks,
//! expansion checks, the cycles-plus-few-paths partition and the active-path
//! algorithm that turns it into cycles plus a small waste set.

mod active;
mod degrees;
mod paths;

pub use active::{
    cover_by_cycles, cover_from_partition, ActiveChoice, CoverCase, CoverResult, TraceStep,
};
pub use degrees::{
    check_outexpansion, large_degree_census, verify_inherited_degrees, ClauseMargin,
    ExpansionMode, InheritedDegreeReport, EXPANSION_EXHAUSTIVE_LIMIT,
};
pub use paths::{partition_cycles_paths, PathCyclePartition};
