//! `so42` command-line front end.
//!
//! Every run writes `report.json` under `--out` with a schema version, the
//! fully resolved configuration and a result payload. Settings resolve as
//! flags, then the flat TOML file given by `--config`, then defaults.
//! Exit codes: 0 when all checks pass, 1 on a failed check or computation
//! error, 2 on usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{verify_algebra, GeneratorId, StructureTable};
use crate::classical::{verify_relations_with, EnergySign, VerifyOptions};
use crate::controllability::{controllability_report_with, ControlSystem, ReportOptions, VERDICT_OK};
use crate::error::{Error, Result};
use crate::representation::{casimir_check, check_commutators, hermiticity_report, BasisState, RepSet};
use crate::simulator::{fidelity, optimize_pulse_with, propagate_from, shell_populations, OptimizeOptions, PulseSchedule};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "so42", version, about = "so(4,2) hydrogen algebra: verification suites, representation, controllability and control simulation")]
struct Cli {
    /// Flat TOML file of default settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for report.json and artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Named tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact structure-constant suite and bracket closure.
    Algebra(AlgebraArgs),
    /// Poisson-bracket verification of the phase-space realizations.
    #[command(alias = "verify")]
    Classical(ClassicalArgs),
    /// Build and check the truncated matrix representation.
    Rep(RepArgs),
    /// Controllability report for a control set.
    Check(CheckArgs),
    /// Propagate a pulse schedule.
    Simulate(SimulateArgs),
    /// Search for a schedule steering one basis state to another.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Args)]
struct AlgebraArgs {
    /// Run the full self-consistency suite (default).
    #[arg(long)]
    verify: bool,
    /// Seeds for the closure, comma separated.
    #[arg(long)]
    seeds: Option<String>,
    /// Also write structure_table.json.
    #[arg(long)]
    export: bool,
}

#[derive(Debug, Args)]
struct ClassicalArgs {
    /// `negative`, `positive` or `both`.
    #[arg(long)]
    sign: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    richardson: bool,
}

#[derive(Debug, Args)]
struct RepArgs {
    #[arg(long)]
    nmax: Option<usize>,
    /// Write every generator and H as CSV under matrices/.
    #[arg(long)]
    export: bool,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long)]
    nmax: Option<usize>,
    /// Comma-separated control generators; `none` for drift only.
    #[arg(long)]
    controls: Option<String>,
    #[arg(long)]
    probes: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    controls: Option<String>,
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long)]
    psi0: Option<String>,
    /// Optional state for a fidelity readout.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    substeps: Option<usize>,
    #[arg(long)]
    t0: Option<f64>,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long)]
    controls: Option<String>,
    #[arg(long)]
    psi0: Option<String>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    segments: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    /// Exit 1 unless this fidelity is reached.
    #[arg(long)]
    min_fidelity: Option<f64>,
}

fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    let v: f64 = v.parse().map_err(|e| format!("{e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Flat key-value config file; every key is optional. Keys other than the
/// named settings must be known tolerance names.
#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    n_max: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    controls: Option<String>,
    seeds: Option<String>,
    sign: Option<String>,
    samples: Option<usize>,
    probes: Option<usize>,
    schedule: Option<PathBuf>,
    psi0: Option<String>,
    target: Option<String>,
    substeps: Option<usize>,
    t0: Option<f64>,
    segments: Option<usize>,
    budget: Option<usize>,
    min_fidelity: Option<f64>,
    richardson: Option<bool>,
    #[serde(flatten)]
    tolerances: BTreeMap<String, f64>,
}

/// The resolved settings of one run, embedded in its report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunConfig {
    pub subcommand: String,
    pub n_max: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub tolerances: BTreeMap<String, f64>,
    pub payload: BTreeMap<String, Value>,
}

fn default_tolerances() -> BTreeMap<String, f64> {
    [
        ("commutator", 1e-9),
        ("hermiticity", 1e-12),
        ("casimir", 1e-9),
        ("constraint", 1e-10),
        ("poisson", 1e-5),
        ("fd_step", 1e-5),
        ("b1", 1e-6),
        ("gap_ratio", 1e3),
        ("norm", 1e-10),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

struct Resolver {
    file: FileConfig,
}

impl Resolver {
    fn pick<T: Clone>(flag: Option<T>, file: &Option<T>, default: T) -> T {
        flag.or_else(|| file.clone()).unwrap_or(default)
    }
}

fn parse_state(s: &str) -> Result<BasisState> {
    let st: BasisState = s.parse()?;
    if !st.is_valid() {
        return Err(usage(format!("`{s}` is not a valid |n l m⟩")));
    }
    Ok(st)
}

fn parse_controls(s: &str) -> Result<Vec<GeneratorId>> {
    match s.trim().to_ascii_lowercase().as_str() {
        "" | "none" => Ok(Vec::new()),
        "all" => Ok(GeneratorId::ALL.to_vec()),
        _ => GeneratorId::parse_list(s),
    }
}

fn names(gs: &[GeneratorId]) -> String {
    if gs.is_empty() {
        return "none".into();
    }
    gs.iter().map(|g| g.name()).collect::<Vec<_>>().join(",")
}

struct Outcome {
    passed: bool,
    result: Value,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let config = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("so42: {e}");
            return 2;
        }
    };
    match execute(&cli.command, &config) {
        Ok(out) => match write_report(&config, &out) {
            Ok(path) => {
                println!("{} {} -> {}", config.subcommand, if out.passed { "PASS" } else { "FAIL" }, path.display());
                i32::from(!out.passed)
            }
            Err(e) => {
                eprintln!("so42: cannot write report: {e}");
                1
            }
        },
        Err(Error::InvalidArgument(msg)) => {
            eprintln!("so42: {msg}");
            2
        }
        Err(e) => {
            eprintln!("so42: {e}");
            1
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("config {}: {e}", p.display())))?;
            toml::from_str::<FileConfig>(&text).map_err(|e| usage(format!("config {}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    let r = Resolver { file };
    let f = &r.file;
    let mut tolerances = default_tolerances();
    for (k, v) in f.tolerances.iter().chain(cli.tol.iter().map(|(k, v)| (k, v))) {
        if !tolerances.contains_key(k) {
            return Err(usage(format!("unknown tolerance `{k}`")));
        }
        if !(*v > 0.0) {
            return Err(usage(format!("tolerance `{k}` must be positive")));
        }
        tolerances.insert(k.clone(), *v);
    }
    let seed = Resolver::pick(cli.seed, &f.seed, 0);
    let output_dir = Resolver::pick(cli.out.clone(), &f.out, PathBuf::from("so42-out"));
    let mut payload = BTreeMap::new();
    let (subcommand, n_max_flag, default_n) = match &cli.command {
        Command::Algebra(a) => {
            let seeds = Resolver::pick(a.seeds.clone(), &f.seeds, "L1,L2,A3,S,C".into());
            payload.insert("seeds".into(), json!(names(&parse_controls(&seeds)?)));
            payload.insert("export".into(), json!(a.export));
            ("algebra", None, 4)
        }
        Command::Classical(a) => {
            let sign = Resolver::pick(a.sign.clone(), &f.sign, "both".into());
            if sign != "both" {
                sign.parse::<EnergySign>()?;
            }
            payload.insert("sign".into(), json!(sign));
            let samples = Resolver::pick(a.samples, &f.samples, 100);
            if samples == 0 {
                return Err(usage("--samples must be positive"));
            }
            payload.insert("samples".into(), json!(samples));
            payload.insert("richardson".into(), json!(a.richardson || f.richardson.unwrap_or(false)));
            ("classical", None, 4)
        }
        Command::Rep(a) => {
            payload.insert("export".into(), json!(a.export));
            ("rep", a.nmax, 6)
        }
        Command::Check(a) => {
            let c = Resolver::pick(a.controls.clone(), &f.controls, "L1,L2,A3,S,C".into());
            payload.insert("controls".into(), json!(names(&parse_controls(&c)?)));
            payload.insert("probes".into(), json!(Resolver::pick(a.probes, &f.probes, 20)));
            ("check", a.nmax, 4)
        }
        Command::Simulate(a) => {
            let c = Resolver::pick(a.controls.clone(), &f.controls, "all".into());
            payload.insert("controls".into(), json!(names(&parse_controls(&c)?)));
            let schedule = a
                .schedule
                .clone()
                .or_else(|| f.schedule.clone())
                .ok_or_else(|| usage("simulate needs --schedule FILE"))?;
            if !schedule.is_file() {
                return Err(usage(format!("schedule file {} not found", schedule.display())));
            }
            payload.insert("schedule".into(), json!(schedule));
            let psi0 = Resolver::pick(a.psi0.clone(), &f.psi0, "1,0,0".into());
            payload.insert("psi0".into(), json!(parse_state(&psi0)?.to_string()));
            if let Some(t) = a.target.clone().or_else(|| f.target.clone()) {
                payload.insert("target".into(), json!(parse_state(&t)?.to_string()));
            }
            payload.insert("substeps".into(), json!(Resolver::pick(a.substeps, &f.substeps, 1).max(1)));
            payload.insert("t0".into(), json!(Resolver::pick(a.t0, &f.t0, 0.0)));
            ("simulate", a.nmax, 4)
        }
        Command::Optimize(a) => {
            let c = Resolver::pick(a.controls.clone(), &f.controls, "B3,G3,D".into());
            payload.insert("controls".into(), json!(names(&parse_controls(&c)?)));
            let psi0 = Resolver::pick(a.psi0.clone(), &f.psi0, "1,0,0".into());
            let target = Resolver::pick(a.target.clone(), &f.target, "2,1,0".into());
            payload.insert("psi0".into(), json!(parse_state(&psi0)?.to_string()));
            payload.insert("target".into(), json!(parse_state(&target)?.to_string()));
            let segments = Resolver::pick(a.segments, &f.segments, DEMO_SEGMENTS);
            if segments == 0 {
                return Err(usage("--segments must be positive"));
            }
            payload.insert("segments".into(), json!(segments));
            payload.insert("budget".into(), json!(Resolver::pick(a.budget, &f.budget, 50_000)));
            payload.insert("min_fidelity".into(), json!(Resolver::pick(a.min_fidelity, &f.min_fidelity, 0.0)));
            ("optimize", a.nmax, 4)
        }
    };
    let n_max = Resolver::pick(n_max_flag, &f.n_max, default_n);
    if n_max < 3 {
        return Err(usage("--nmax must be at least 3"));
    }
    Ok(RunConfig {
        subcommand: subcommand.into(),
        n_max,
        seed,
        output_dir,
        tolerances,
        payload,
    })
}

/// Segment count used by the `optimize` default and the demonstration.
pub const DEMO_SEGMENTS: usize = 20;

impl RunConfig {
    fn tol(&self, k: &str) -> f64 {
        self.tolerances[k]
    }

    fn str(&self, k: &str) -> &str {
        self.payload[k].as_str().expect("string payload")
    }

    fn usize(&self, k: &str) -> usize {
        self.payload[k].as_u64().expect("integer payload") as usize
    }

    fn state(&self, k: &str) -> Result<BasisState> {
        parse_state(self.str(k))
    }

    fn system(&self) -> Result<ControlSystem> {
        let rep = Arc::new(RepSet::build(self.n_max)?);
        ControlSystem::new(rep, &parse_controls(self.str("controls"))?)
    }
}

fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    match cmd {
        Command::Algebra(_) => {
            let seeds = parse_controls(cfg.str("seeds"))?;
            let report = verify_algebra(&seeds);
            if cfg.payload["export"].as_bool() == Some(true) {
                let doc = StructureTable::so42().to_document();
                std::fs::write(cfg.output_dir.join("structure_table.json"), serde_json::to_string_pretty(&doc)?)?;
            }
            Ok(Outcome {
                passed: report.passed,
                result: serde_json::to_value(&report)?,
            })
        }
        Command::Classical(_) => {
            let signs = match cfg.str("sign") {
                "both" => vec![EnergySign::Negative, EnergySign::Positive],
                s => vec![s.parse()?],
            };
            let opts = VerifyOptions {
                step: cfg.tol("fd_step"),
                tolerance: cfg.tol("poisson"),
                richardson: cfg.payload["richardson"].as_bool() == Some(true),
                ..Default::default()
            };
            let mut passed = true;
            let mut out = Vec::new();
            for sign in signs {
                let r = verify_relations_with(sign, cfg.usize("samples"), cfg.seed, &opts)?;
                passed &= r.passed;
                out.push(r);
            }
            Ok(Outcome {
                passed,
                result: serde_json::to_value(&out)?,
            })
        }
        Command::Rep(_) => {
            let rep = RepSet::build(cfg.n_max)?;
            let comm = check_commutators(&rep, cfg.tol("commutator"));
            let herm = hermiticity_report(&rep, cfg.tol("hermiticity"));
            let cas = casimir_check(&rep, cfg.tol("casimir"));
            let constraint = rep.tables.max_residual();
            let constraint_ok = constraint < cfg.tol("constraint");
            if cfg.payload["export"].as_bool() == Some(true) {
                let dir = cfg.output_dir.join("matrices");
                std::fs::create_dir_all(&dir)?;
                for g in GeneratorId::ALL {
                    std::fs::write(dir.join(format!("{}.csv", g.name())), rep.generator(g).to_csv())?;
                }
                std::fs::write(dir.join("H.csv"), rep.hamiltonian.to_csv())?;
                let basis: Vec<String> = rep.basis.states().iter().map(|s| s.to_string()).collect();
                std::fs::write(dir.join("basis.json"), serde_json::to_string_pretty(&basis)?)?;
            }
            Ok(Outcome {
                passed: comm.passed && herm.passed && cas.passed && constraint_ok,
                result: json!({
                    "dim": rep.dim(),
                    "interior_dim": rep.interior_dim(),
                    "constraint_residual": constraint,
                    "constraint_residuals": rep.tables.residuals,
                    "commutators": comm,
                    "hermiticity": herm,
                    "casimir": cas,
                }),
            })
        }
        Command::Check(_) => {
            let sys = cfg.system()?;
            let opts = ReportOptions {
                b1_step: cfg.tol("fd_step"),
                b1_tol: cfg.tol("b1"),
                gap_ratio: cfg.tol("gap_ratio"),
                ..Default::default()
            };
            let psi = sys.basis_state(BasisState::new(1, 0, 0))?;
            let r = controllability_report_with(&sys, &psi, cfg.usize("probes"), cfg.seed, &opts)?;
            Ok(Outcome {
                passed: r.verdict == VERDICT_OK,
                result: serde_json::to_value(&r)?,
            })
        }
        Command::Simulate(_) => {
            let sys = cfg.system()?;
            let schedule = PulseSchedule::load(Path::new(cfg.str("schedule")))?;
            let psi0 = sys.basis_state(cfg.state("psi0")?)?;
            let t0 = cfg.payload["t0"].as_f64().unwrap_or(0.0);
            let traj = propagate_from(&sys, &schedule, &psi0, t0, cfg.usize("substeps"))?;
            traj.save_csv(sys.rep(), &cfg.output_dir.join("trajectory.csv"))?;
            let last = traj.final_state();
            let target_fidelity = match cfg.payload.get("target") {
                Some(_) => Some(fidelity(last, &sys.basis_state(cfg.state("target")?)?)),
                None => None,
            };
            let norm_ok = traj.max_norm_defect() < cfg.tol("norm");
            Ok(Outcome {
                passed: norm_ok,
                result: json!({
                    "segments": schedule.segments.len(),
                    "total_duration": schedule.total_duration(),
                    "final_time": traj.final_time(),
                    "final_shell_populations": shell_populations(sys.rep(), last),
                    "max_norm_defect": traj.max_norm_defect(),
                    "max_boundary_population": traj.max_boundary_population(),
                    "truncation_unreliable": traj.truncation_unreliable(),
                    "target_fidelity": target_fidelity,
                }),
            })
        }
        Command::Optimize(_) => {
            let sys = cfg.system()?;
            let psi0 = sys.basis_state(cfg.state("psi0")?)?;
            let target = sys.basis_state(cfg.state("target")?)?;
            let opts = OptimizeOptions::default();
            let r = optimize_pulse_with(&sys, &psi0, &target, cfg.usize("segments"), cfg.usize("budget"), cfg.seed, &opts)?;
            r.schedule.save(&cfg.output_dir.join("schedule.json"))?;
            let traj = propagate_from(&sys, &r.schedule, &psi0, 0.0, 1)?;
            traj.save_csv(sys.rep(), &cfg.output_dir.join("trajectory.csv"))?;
            let min_f = cfg.payload["min_fidelity"].as_f64().unwrap_or(0.0);
            Ok(Outcome {
                passed: r.fidelity >= min_f,
                result: json!({
                    "fidelity": r.fidelity,
                    "objective": r.objective,
                    "evaluations": r.evaluations,
                    "reachable_dim": r.reachable_dim,
                    "max_boundary_population": traj.max_boundary_population(),
                    "truncation_unreliable": traj.truncation_unreliable(),
                    "options": opts,
                    "starts": r.starts,
                }),
            })
        }
    }
}

fn timestamp() -> String {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{now}")
}

/// Serializes the report; everything except the `timestamp` field is a pure
/// function of the resolved configuration.
fn write_report(cfg: &RunConfig, out: &Outcome) -> Result<PathBuf> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "config": cfg,
        "passed": out.passed,
        "result": out.result,
        "timestamp": timestamp(),
    });
    let path = cfg.output_dir.join("report.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
    Ok(path)
}
