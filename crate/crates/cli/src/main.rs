use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hamlab_core::assembly::{assemble_with_trace, AssemblyParams, UseCap};
use hamlab_core::conditions::{check, gen_concluding_example, gen_extremal_chvatal, ConditionName};
use hamlab_core::cover::cover_by_cycles;
use hamlab_core::digraph::FactorJson;
use hamlab_core::lab::{
    brute_force_hamiltonian, gen_blowup, gen_cover_instance, gen_random_condition, max_cycle_cover_coverage,
    run_experiment, standard_blowup_frame, GeneratorSpec, InstanceSpec,
};
use hamlab_core::rational::{parse_rational, Rational};
use hamlab_core::regular::{
    certify_regular, certify_super_regular, regular_pair_matching, select_ideal, CertifyMode, ClusterPartition,
    Pair, PartitionJson, DEFAULT_SAMPLES,
};
use hamlab_core::{verify_hamilton_cycle, Digraph, Error, HamiltonCertificate, OneFactor};

#[derive(Parser)]
#[command(name = "hamlab", version, about = "Digraph Hamiltonicity laboratory")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the main result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for experiments; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Evaluate a degree condition; exits 1 when it fails.
    Check {
        #[arg(long)]
        condition: String,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        input: PathBuf,
    },
    /// Cover a reduced digraph by disjoint cycles.
    Cover {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        d: String,
        /// JSON-lines trace, one record per iteration.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Choose active paths at random (seeded) instead of longest first.
        #[arg(long)]
        random: bool,
    },
    /// Regular-pair tools on a pair of clusters.
    Pairs {
        #[command(subcommand)]
        action: PairsCmd,
    },
    /// Assemble a Hamilton cycle of a clustered digraph.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        factor: PathBuf,
        #[arg(long)]
        eta: Option<String>,
        /// Certificate file; defaults to --output or stdout.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Full stage trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CapArg::Quarter)]
        cap: CapArg,
    },
    /// Exact oracles for small digraphs.
    Oracle {
        #[command(subcommand)]
        action: OracleCmd,
    },
    /// Run a campaign of generated instances.
    Experiment {
        /// JSON array of instance specs.
        #[arg(long, conflicts_with = "campaign")]
        spec: Option<PathBuf>,
        #[arg(long, value_enum)]
        campaign: Option<Campaign>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        n_min: usize,
        #[arg(long, default_value_t = 18)]
        n_max: usize,
        #[arg(long, default_value = "1/4")]
        beta: String,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Strongly connected non-Hamiltonian extremal family.
    Extremal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Forward tournament with backward edges in two end blocks.
    Concluding {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: String,
    },
    /// Blow-up of a complete reduced digraph with F made of 4-cycles.
    Blowup {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        v0: usize,
        #[arg(long)]
        partition_out: Option<PathBuf>,
        #[arg(long)]
        factor_out: Option<PathBuf>,
    },
    /// Random digraph repaired to satisfy the semi-exact condition.
    RandomCondition {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: String,
    },
    /// Reduced digraph for the cycle-cover algorithm.
    CoverInstance {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: String,
    },
}

#[derive(Subcommand)]
enum PairsCmd {
    /// Certify ε-regularity, or super-regularity when --d is given; exits 1 on failure.
    Certify {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        d: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Matching guaranteed by regularity.
    Matching {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        super_regular: bool,
    },
    /// Ideal `(A*, B*)` of the pair.
    Ideal {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        d: String,
    },
}

#[derive(clap::Args)]
struct PairArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    /// Cluster index of the left side.
    #[arg(long)]
    a: usize,
    /// Cluster index of the right side.
    #[arg(long)]
    b: usize,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exact Hamiltonicity (n ≤ 20); exits 1 when there is no Hamilton cycle.
    Hamilton {
        #[arg(long)]
        input: PathBuf,
    },
    /// Largest number of vertices covered by disjoint cycles (n ≤ 16).
    Coverage {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum CapArg {
    Strict,
    Quarter,
}

#[derive(Clone, Copy, ValueEnum)]
enum Campaign {
    SemiExact,
}

/// Successful runs either confirm (0) or report a negative verdict (1).
enum Verdict {
    Yes,
    No,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Verdict::Yes) => ExitCode::SUCCESS,
        Ok(Verdict::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let Some(err) = e.downcast_ref::<Error>() else {
        return 2;
    };
    if err.is_wrong_pipeline() {
        return 3;
    }
    match err.root() {
        Error::Parse(_)
        | Error::Json(_)
        | Error::Io(_)
        | Error::Parameter(_)
        | Error::InvalidGraph(_)
        | Error::VertexOutOfRange { .. }
        | Error::InvalidPartition(_)
        | Error::InvalidFactor(_)
        | Error::MalformedCertificate(_)
        | Error::Scale(_) => 2,
        _ => 4,
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_graph(path: &Path) -> anyhow::Result<Digraph> {
    Ok(Digraph::parse_any(&read(path)?)?)
}

fn load_partition(path: &Path, n: usize) -> anyhow::Result<ClusterPartition> {
    let json: PartitionJson = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    Ok(ClusterPartition::from_json(n, &json)?)
}

fn load_factor(path: &Path, k: usize) -> anyhow::Result<OneFactor> {
    let json: FactorJson = serde_json::from_str(&read(path)?).map_err(Error::from)?;
    Ok(OneFactor::from_json(k, &json)?)
}

fn rational(s: &str) -> anyhow::Result<Rational> {
    Ok(parse_rational(s)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

impl Cli {
    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.output {
            Some(p) => write(p, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_graph(&self, g: &Digraph) -> anyhow::Result<()> {
        match self.format {
            Format::Json => self.emit(&(g.to_json_string() + "\n")),
            Format::Csv => {
                let mut s = String::from("source,target\n");
                for (u, v) in g.edges() {
                    s.push_str(&format!("{u},{v}\n"));
                }
                self.emit(&s)
            }
        }
    }

    fn csv_only_json(&self, what: &str) -> anyhow::Result<()> {
        if self.format == Format::Csv {
            return Err(Error::Parameter(format!("{what} has no CSV output")).into());
        }
        Ok(())
    }
}

fn run(cli: &Cli) -> anyhow::Result<Verdict> {
    match &cli.command {
        Command::Gen { kind } => gen(cli, kind),
        Command::Check { condition, beta, input } => {
            let g = load_graph(input)?;
            let name = ConditionName::parse(condition)?;
            let beta = beta.as_deref().map(rational).transpose()?;
            let report = check(&g, name, beta)?;
            match cli.format {
                Format::Json => cli.emit(&to_json(&report))?,
                Format::Csv => cli.emit(&format!(
                    "condition,n,holds,first_violation\n{condition},{},{},{}\n",
                    report.n,
                    report.holds,
                    report.first_violation.map_or(String::new(), |i| i.to_string())
                ))?,
            }
            Ok(if report.holds { Verdict::Yes } else { Verdict::No })
        }
        Command::Cover { input, d, trace, random } => {
            cli.csv_only_json("cover")?;
            let r = load_graph(input)?;
            let d = rational(d)?;
            let res = cover_by_cycles(&r, d, random.then_some(cli.seed))?;
            if let Some(p) = trace {
                write(p, &res.trace_jsonl())?;
            }
            #[derive(Serialize)]
            struct Summary<'a> {
                cycles: &'a [Vec<usize>],
                waste: &'a [usize],
                within_bound: bool,
                iterations: usize,
            }
            cli.emit(&to_json(&Summary {
                cycles: &res.cycles,
                waste: &res.waste,
                within_bound: res.within_bound(d, r.n()),
                iterations: res.trace.len(),
            }))?;
            Ok(Verdict::Yes)
        }
        Command::Pairs { action } => pairs(cli, action),
        Command::Solve {
            input,
            partition,
            factor,
            eta,
            cert,
            trace,
            cap,
        } => {
            let g = load_graph(input)?;
            let part = load_partition(partition, g.n())?;
            let f = load_factor(factor, part.k())?;
            let mut params = AssemblyParams {
                cap: match cap {
                    CapArg::Strict => UseCap::Strict,
                    CapArg::Quarter => UseCap::Quarter,
                },
                ..AssemblyParams::default()
            };
            if let Some(eta) = eta {
                params.eta = rational(eta)?;
            }
            let t = assemble_with_trace(&g, &part, &f, &params, cli.seed)?;
            if !verify_hamilton_cycle(&g, &t.certificate)? {
                return Err(anyhow!(Error::AssemblyBug("certificate failed verification".into())));
            }
            if let Some(p) = trace {
                write(p, &to_json(&t))?;
            }
            let text = serde_json::to_string(&t.certificate).expect("plain data serializes") + "\n";
            match cert {
                Some(p) => write(p, &text)?,
                None => cli.emit(&text)?,
            }
            Ok(Verdict::Yes)
        }
        Command::Oracle { action } => match action {
            OracleCmd::Hamilton { input } => {
                cli.csv_only_json("oracle")?;
                let g = load_graph(input)?;
                let cert: Option<HamiltonCertificate> = brute_force_hamiltonian(&g)?;
                #[derive(Serialize)]
                struct Answer {
                    hamiltonian: bool,
                    order: Option<Vec<usize>>,
                }
                let found = cert.is_some();
                cli.emit(&to_json(&Answer {
                    hamiltonian: found,
                    order: cert.map(|c| c.order),
                }))?;
                Ok(if found { Verdict::Yes } else { Verdict::No })
            }
            OracleCmd::Coverage { input } => {
                cli.csv_only_json("oracle")?;
                let g = load_graph(input)?;
                let c = max_cycle_cover_coverage(&g)?;
                cli.emit(&format!("{{\"n\": {}, \"coverage\": {c}}}\n", g.n()))?;
                Ok(Verdict::Yes)
            }
        },
        Command::Experiment {
            spec,
            campaign,
            count,
            n_min,
            n_max,
            beta,
        } => {
            let specs: Vec<InstanceSpec> = match (spec, campaign) {
                (Some(p), _) => serde_json::from_str(&read(p)?).map_err(Error::from)?,
                (None, Some(Campaign::SemiExact)) => {
                    if n_min > n_max {
                        return Err(Error::Parameter(format!("n-min {n_min} exceeds n-max {n_max}")).into());
                    }
                    let beta = rational(beta)?;
                    (0..*count)
                        .map(|i| InstanceSpec {
                            generator: GeneratorSpec::RandomCondition {
                                n: n_min + i % (n_max - n_min + 1),
                                beta,
                            },
                            seed: cli.seed.wrapping_add(i as u64),
                        })
                        .collect()
                }
                (None, None) => {
                    return Err(Error::Parameter("experiment needs --spec or --campaign".into()).into())
                }
            };
            let report = run_experiment(&specs, cli.jobs);
            match cli.format {
                Format::Json => cli.emit(&(report.to_json() + "\n"))?,
                Format::Csv => cli.emit(&report.to_csv()?)?,
            }
            Ok(Verdict::Yes)
        }
    }
}

fn gen(cli: &Cli, kind: &GenKind) -> anyhow::Result<Verdict> {
    let g = match kind {
        GenKind::Extremal { n, k } => gen_extremal_chvatal(*n, *k)?,
        GenKind::Concluding { n, a } => gen_concluding_example(*n, rational(a)?)?,
        GenKind::RandomCondition { n, beta } => gen_random_condition(*n, rational(beta)?, cli.seed)?,
        GenKind::CoverInstance { k, d } => gen_cover_instance(*k, rational(d)?, cli.seed)?,
        GenKind::Blowup {
            k,
            m,
            density,
            v0,
            partition_out,
            factor_out,
        } => {
            let (r0, f0) = standard_blowup_frame(*k)?;
            let b = gen_blowup(&r0, &f0, *m, *density, *v0, cli.seed)?;
            if let Some(p) = partition_out {
                write(p, &to_json(&b.partition.to_json()))?;
            }
            if let Some(p) = factor_out {
                write(p, &to_json(&b.factor.to_json()))?;
            }
            b.g
        }
    };
    cli.emit_graph(&g)?;
    Ok(Verdict::Yes)
}

fn pairs(cli: &Cli, action: &PairsCmd) -> anyhow::Result<Verdict> {
    cli.csv_only_json("pairs")?;
    let args = match action {
        PairsCmd::Certify { pair, .. } | PairsCmd::Matching { pair, .. } | PairsCmd::Ideal { pair, .. } => pair,
    };
    let g = load_graph(&args.input)?;
    let part = load_partition(&args.partition, g.n())?;
    let side = |c: usize| {
        part.clusters
            .get(c)
            .cloned()
            .ok_or_else(|| Error::Parameter(format!("no cluster {c}; partition has {}", part.k())))
    };
    let p = Pair::new(&g, side(args.a)?, side(args.b)?)?;
    match action {
        PairsCmd::Certify {
            eps,
            d,
            mode,
            samples,
            ..
        } => {
            let mode = match mode {
                ModeArg::Auto => CertifyMode::auto(p.a.len(), p.b.len(), cli.seed),
                ModeArg::Exhaustive => CertifyMode::Exhaustive,
                ModeArg::Sampled => CertifyMode::Sampled {
                    samples: *samples,
                    seed: cli.seed,
                },
            };
            let eps = rational(eps)?;
            let ok = match d {
                Some(d) => {
                    let v = certify_super_regular(&p, eps, rational(d)?, mode)?;
                    cli.emit(&to_json(&v))?;
                    v.super_regular
                }
                None => {
                    let v = certify_regular(&p, eps, mode)?;
                    cli.emit(&to_json(&v))?;
                    v.regular
                }
            };
            Ok(if ok { Verdict::Yes } else { Verdict::No })
        }
        PairsCmd::Matching { eps, super_regular, .. } => {
            let mm = regular_pair_matching(&p, rational(eps)?, *super_regular)?;
            cli.emit(&to_json(&serde_json::json!({ "size": mm.pairs.len(), "pairs": mm.pairs })))?;
            Ok(Verdict::Yes)
        }
        PairsCmd::Ideal { theta, d, .. } => {
            let ideal = select_ideal(&p, rational(theta)?, rational(d)?, cli.seed)?;
            cli.emit(&to_json(&ideal))?;
            Ok(Verdict::Yes)
        }
    }
}
