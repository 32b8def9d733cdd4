use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{brute_force_hamiltonian, gen_blowup, gen_random_condition, standard_blowup_frame, BRUTE_FORCE_LIMIT};
use crate::assembly::{assemble_hamilton, AssemblyParams};
use crate::conditions::{check, gen_concluding_example, gen_extremal_chvatal, ConditionName};
use crate::digraph::{verify_hamilton_cycle, Digraph};
use crate::error::{Error, Result};
use crate::hamilton::find_hamilton_cycle;
use crate::rational::{self, Rational};

pub const CSV_HEADER: &str = "# hamlab-experiment-csv v1";

/// Time allowed to the generic search on instances above the exact limit.
const SEARCH_DEADLINE: Duration = Duration::from_secs(2);

const CONDITIONS: [ConditionName; 6] = [
    ConditionName::GhouilaHouri,
    ConditionName::Posa,
    ConditionName::NashWilliamsChvatal,
    ConditionName::SemiExact,
    ConditionName::PosaMin,
    ConditionName::Kot,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum GeneratorSpec {
    ExtremalChvatal {
        n: usize,
        k: usize,
    },
    Concluding {
        n: usize,
        #[serde(with = "rational::serde_str")]
        a: Rational,
    },
    /// Complete `r0` on `k` clusters, `F` made of 4-cycles.
    Blowup {
        k: usize,
        m: usize,
        density: f64,
        v0: usize,
    },
    RandomCondition {
        n: usize,
        #[serde(with = "rational::serde_str")]
        beta: Rational,
    },
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::ExtremalChvatal { .. } => "extremal_chvatal",
            GeneratorSpec::Concluding { .. } => "concluding",
            GeneratorSpec::Blowup { .. } => "blowup",
            GeneratorSpec::RandomCondition { .. } => "random_condition",
        }
    }

    /// β used for the β-conditions in reports.
    fn beta(&self) -> Rational {
        match self {
            GeneratorSpec::RandomCondition { beta, .. } => *beta,
            _ => Rational::new(1, 4),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(flatten)]
    pub generator: GeneratorSpec,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolverOutcome {
    /// A certificate that passed re-verification.
    Verified { length: usize },
    /// The search is exact here and found nothing.
    NotFound,
    WrongPipeline { reason: String },
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub spec: InstanceSpec,
    pub n: Option<usize>,
    pub checks: BTreeMap<String, bool>,
    pub solver: Option<SolverOutcome>,
    /// Exact Hamiltonicity, for `n ≤ 20`.
    pub oracle: Option<bool>,
    /// Whether solver and oracle agree, when both are conclusive.
    pub agree: Option<bool>,
    pub error: Option<String>,
    pub wall_ms: f64,
}

impl InstanceRecord {
    /// The record with its timing field cleared.
    pub fn untimed(&self) -> Self {
        InstanceRecord {
            wall_ms: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aggregates {
    pub instances: usize,
    pub errors: usize,
    pub solver_verified: usize,
    pub oracle_hamiltonian: usize,
    pub oracle_non_hamiltonian: usize,
    pub disagreements: usize,
    pub condition_holds: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub records: Vec<InstanceRecord>,
    pub aggregates: Aggregates,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["index", "generator", "parameters", "seed", "n"];
        let names: Vec<String> = CONDITIONS.iter().map(|c| condition_key(*c)).collect();
        header.extend(names.iter().map(String::as_str));
        header.extend(["solver", "oracle", "agree", "error", "wall_ms"]);
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.records {
            let params = serde_json::to_value(&r.spec.generator)?;
            let opt = |b: Option<bool>| b.map_or(String::new(), |b| b.to_string());
            let mut row = vec![
                r.index.to_string(),
                r.spec.generator.name().to_string(),
                params.to_string(),
                r.spec.seed.to_string(),
                r.n.map_or(String::new(), |n| n.to_string()),
            ];
            row.extend(names.iter().map(|c| opt(r.checks.get(c).copied())));
            row.push(r.solver.as_ref().map_or(String::new(), solver_label));
            row.push(opt(r.oracle));
            row.push(opt(r.agree));
            row.push(r.error.clone().unwrap_or_default());
            row.push(format!("{:.3}", r.wall_ms));
            w.write_record(&row).map_err(csv_err)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Ok(format!("{CSV_HEADER}\n{body}"))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn condition_key(c: ConditionName) -> String {
    serde_json::to_value(c)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .expect("unit variant")
}

fn solver_label(s: &SolverOutcome) -> String {
    match s {
        SolverOutcome::Verified { .. } => "verified".into(),
        SolverOutcome::NotFound => "not_found".into(),
        SolverOutcome::WrongPipeline { .. } => "wrong_pipeline".into(),
        SolverOutcome::Failed { .. } => "failed".into(),
    }
}

/// Whether `HAMLAB_DETERMINISTIC=1` is set.
pub fn deterministic_env() -> bool {
    std::env::var("HAMLAB_DETERMINISTIC").is_ok_and(|v| v == "1")
}

/// Runs every instance (in parallel over `jobs` workers, 0 meaning the rayon
/// default) and collects the records in spec order.
pub fn run_experiment(specs: &[InstanceSpec], jobs: usize) -> ExperimentReport {
    let jobs = if deterministic_env() { 1 } else { jobs };
    let run = || -> Vec<InstanceRecord> {
        specs.par_iter().enumerate().map(|(i, s)| run_instance(i, s)).collect()
    };
    let records = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(run),
        Err(_) => specs.iter().enumerate().map(|(i, s)| run_instance(i, s)).collect(),
    };
    let aggregates = aggregate(&records);
    ExperimentReport { records, aggregates }
}

fn aggregate(records: &[InstanceRecord]) -> Aggregates {
    let mut a = Aggregates {
        instances: records.len(),
        ..Aggregates::default()
    };
    for r in records {
        a.errors += r.error.is_some() as usize;
        a.solver_verified += matches!(r.solver, Some(SolverOutcome::Verified { .. })) as usize;
        a.oracle_hamiltonian += (r.oracle == Some(true)) as usize;
        a.oracle_non_hamiltonian += (r.oracle == Some(false)) as usize;
        a.disagreements += (r.agree == Some(false)) as usize;
        for (c, &holds) in &r.checks {
            *a.condition_holds.entry(c.clone()).or_default() += holds as usize;
        }
    }
    a
}

/// Builds the digraph named by `spec`.
pub fn generate(spec: &InstanceSpec) -> Result<Digraph> {
    Ok(match &spec.generator {
        GeneratorSpec::ExtremalChvatal { n, k } => gen_extremal_chvatal(*n, *k)?,
        GeneratorSpec::Concluding { n, a } => gen_concluding_example(*n, *a)?,
        GeneratorSpec::RandomCondition { n, beta } => gen_random_condition(*n, *beta, spec.seed)?,
        GeneratorSpec::Blowup { k, m, density, v0 } => {
            let (r0, f0) = standard_blowup_frame(*k)?;
            gen_blowup(&r0, &f0, *m, *density, *v0, spec.seed)?.g
        }
    })
}

pub fn run_instance(index: usize, spec: &InstanceSpec) -> InstanceRecord {
    let start = Instant::now();
    let mut rec = InstanceRecord {
        index,
        spec: spec.clone(),
        n: None,
        checks: BTreeMap::new(),
        solver: None,
        oracle: None,
        agree: None,
        error: None,
        wall_ms: 0.0,
    };
    if let Err(e) = fill(&mut rec, spec) {
        rec.error = Some(e.to_string());
    }
    rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    rec
}

fn fill(rec: &mut InstanceRecord, spec: &InstanceSpec) -> Result<()> {
    let blowup = match &spec.generator {
        GeneratorSpec::Blowup { k, m, density, v0 } => {
            let (r0, f0) = standard_blowup_frame(*k)?;
            Some(gen_blowup(&r0, &f0, *m, *density, *v0, spec.seed)?)
        }
        _ => None,
    };
    let g = match &blowup {
        Some(b) => b.g.clone(),
        None => generate(spec)?,
    };
    rec.n = Some(g.n());
    let beta = spec.generator.beta();
    for c in CONDITIONS {
        rec.checks.insert(condition_key(c), check(&g, c, Some(beta))?.holds);
    }
    let found = match &blowup {
        Some(b) => assemble_hamilton(&b.g, &b.partition, &b.factor, &AssemblyParams::default(), spec.seed),
        None => find_hamilton_cycle(&g, SEARCH_DEADLINE, spec.seed),
    };
    let solver = match found {
        Ok(cert) if verify_hamilton_cycle(&g, &cert)? => SolverOutcome::Verified { length: cert.order.len() },
        Ok(_) => SolverOutcome::Failed {
            reason: "certificate rejected by the verifier".into(),
        },
        Err(Error::NotHamiltonian) => SolverOutcome::NotFound,
        Err(e) if e.is_wrong_pipeline() => SolverOutcome::WrongPipeline { reason: e.to_string() },
        Err(e) => SolverOutcome::Failed { reason: e.to_string() },
    };
    if g.n() <= BRUTE_FORCE_LIMIT {
        let h = brute_force_hamiltonian(&g)?.is_some();
        rec.oracle = Some(h);
        rec.agree = match solver {
            SolverOutcome::Verified { .. } => Some(h),
            SolverOutcome::NotFound => Some(!h),
            _ => None,
        };
    }
    rec.solver = Some(solver);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn empty_campaign() {
        let r = run_experiment(&[], 2);
        assert!(r.records.is_empty());
        assert_eq!(r.aggregates.instances, 0);
        assert!(r.to_csv().unwrap().starts_with(CSV_HEADER));
    }

    #[test]
    fn duplicate_seeds_match() {
        let s = InstanceSpec {
            generator: GeneratorSpec::RandomCondition { n: 12, beta: ratio(1, 4) },
            seed: 9,
        };
        let r = run_experiment(&[s.clone(), s], 2);
        let (a, b) = (r.records[0].untimed(), r.records[1].untimed());
        assert_eq!(
            serde_json::to_string(&InstanceRecord { index: 0, ..a }).unwrap(),
            serde_json::to_string(&InstanceRecord { index: 0, ..b }).unwrap()
        );
        assert_eq!(r.aggregates.disagreements, 0);
    }

    #[test]
    fn extremal_is_not_found() {
        let s = InstanceSpec {
            generator: GeneratorSpec::ExtremalChvatal { n: 10, k: 4 },
            seed: 0,
        };
        let r = run_experiment(&[s], 1);
        let rec = &r.records[0];
        assert_eq!(rec.solver, Some(SolverOutcome::NotFound));
        assert_eq!(rec.oracle, Some(false));
        assert_eq!(rec.agree, Some(true));
        assert!(!rec.checks["nash-williams-chvatal"]);
    }

    #[test]
    fn bad_parameters_are_recorded() {
        let s = InstanceSpec {
            generator: GeneratorSpec::ExtremalChvatal { n: 6, k: 3 },
            seed: 0,
        };
        let r = run_experiment(&[s], 1);
        assert!(r.records[0].error.is_some());
        assert_eq!(r.aggregates.errors, 1);
    }

    #[test]
    fn spec_json_shape() {
        let s: InstanceSpec =
            serde_json::from_str(r#"{"generator":"blowup","k":8,"m":10,"density":0.8,"v0":2,"seed":3}"#).unwrap();
        assert_eq!(s.generator, GeneratorSpec::Blowup { k: 8, m: 10, density: 0.8, v0: 2 });
    }
}
