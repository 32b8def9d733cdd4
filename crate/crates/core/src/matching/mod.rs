//! Bipartite matching and König covers, 1-factors via the doubled bipartite
//! graph, and Menger-style connectivity.

mod bipartite;
mod factor;
mod flow;

pub use bipartite::{
    defect_hall_matching, exhaustive_deficiency, hall_violator, max_matching, min_cover, Cover,
    Matching,
};
pub use factor::{doubled_bipartite, find_one_factor, FactorCertificate};
pub use flow::{
    find_separator, internally_disjoint_paths, is_strongly_connected, local_connectivity,
    strong_connectivity,
};
