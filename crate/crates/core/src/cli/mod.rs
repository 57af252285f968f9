//! The `matchkit` command line: argument definitions, command
//! implementations and exit codes.
//!
//! Exit codes: `0` positive verdict, `1` negative verdict, `2` input or
//! parameter error, `3` search budget exhausted. The search budget defaults
//! to [`DEFAULT_BUDGET`](crate::DEFAULT_BUDGET); `MATCHKIT_BUDGET` overrides
//! the default and `--budget` overrides both.

pub mod formats;
pub mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::analysis::{
    demand_type, is_totally_unimodular, prop1_check, tu_cycle_certificate, vector_label, Prop1Verdict, TuVerdict,
};
use crate::discrete_solver::{enumerate_stable_matchings, run_blocking_dynamics, DynamicsOutcome};
use crate::error::{Error, Result};
use crate::generator::{gen_discrete_market, gen_roadmap_instance, gen_tu_market, GenParams, InstanceKind};
use crate::hypergraph::{Balance, FirmWorkerHypergraph, HyperCycle, IntMatrix};
use crate::model::{format_rational, parse_rational, DiscreteMarket, DiscreteMatching, Market, TuMarket};
use crate::roadmap::{theorem3_report, validate_roadmap, Specialization};
use crate::tu_solver::{find_stable_matching_tu, TuOutcome};
use formats::{
    discrete_matching_to_json, market_to_json, parse_discrete_matching, parse_market, parse_roadmap, roadmap_to_json,
    to_text, tu_matching_to_json,
};
pub use report::Report;

pub const ENV_BUDGET: &str = "MATCHKIT_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "matchkit", version, about = "Stable matchings in many-to-one markets")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Tu,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Matching,
    Certificate,
    Lp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Tu,
    Discrete,
    Roadmap,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search the firm-worker hypergraph for a nontrivial odd cycle.
    Balance {
        market: PathBuf,
        /// Expected market kind; a mismatch is an input error.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Decide stability of a TU market through the coalition LP.
    SolveTu {
        market: PathBuf,
        /// Sections to include; defaults to the matching or the certificate.
        #[arg(long, value_enum)]
        emit: Vec<Emit>,
    },
    /// Enumerate stable matchings of a discrete market or trace dynamics.
    SolveDiscrete {
        market: PathBuf,
        #[arg(long, conflicts_with = "first")]
        all: bool,
        #[arg(long)]
        first: bool,
        #[arg(long)]
        dynamics: bool,
        /// Starting matching for --dynamics (default: everyone unmatched).
        #[arg(long, requires = "dynamics")]
        start: Option<PathBuf>,
        #[arg(long, default_value_t = 100, requires = "dynamics")]
        max_steps: usize,
    },
    /// Cycle condition, demand type, unimodularity and determinant certificate.
    Analyze {
        market: PathBuf,
        #[arg(long)]
        prop1: bool,
        #[arg(long)]
        demand_type: bool,
        #[arg(long)]
        tu_check: bool,
        #[arg(long)]
        certificate: bool,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Specialists, specialized firms and balancedness over a roadmap.
    Roadmap {
        roadmap: PathBuf,
        market: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Write a seeded random instance.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub firms: usize,
    #[arg(long, default_value_t = 4)]
    pub workers: usize,
    #[arg(long, default_value_t = 3)]
    pub max_sets: usize,
    #[arg(long, default_value_t = 2)]
    pub max_set_size: usize,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub min_value: String,
    #[arg(long, default_value = "10", allow_hyphen_values = true)]
    pub max_value: String,
    /// Probability that a worker accepts a firm, as "p/q" or an integer.
    #[arg(long, default_value = "1")]
    pub density: String,
    /// Number of technologies (roadmap only).
    #[arg(long)]
    pub technologies: Option<usize>,
    /// Market kind paired with a roadmap.
    #[arg(long, value_enum, default_value_t = Kind::Discrete)]
    pub market_kind: Kind,
    /// Output file (the roadmap, for `roadmap`); omitted means the report
    /// carries the instance.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Market file paired with a generated roadmap.
    #[arg(long)]
    pub market_out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and renders the
/// report. Returns the exit code, stdout text and stderr text.
pub fn run_from_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let echo: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            return if e.use_stderr() {
                (2, String::new(), e.to_string())
            } else {
                (0, e.to_string(), String::new())
            };
        }
    };
    let format = cli.format;
    let report = run(cli, echo);
    let text = match format {
        Format::Json => report.to_json(),
        Format::Human => report.to_human(),
    };
    let err = match report.details.get("error") {
        Some(Value::String(e)) => format!("error: {e}\n"),
        _ => String::new(),
    };
    (report.exit_code, text, err)
}

/// Runs a parsed command; errors become reports with exit code 2 or 3.
pub fn run(cli: Cli, echo: Vec<String>) -> Report {
    let started = Instant::now();
    let mut report = Report::new(echo);
    let result = match cli.command {
        Command::Balance { market, kind, budget } => cmd_balance(&mut report, &market, kind, budget),
        Command::SolveTu { market, emit } => cmd_solve_tu(&mut report, &market, &emit),
        Command::SolveDiscrete {
            market,
            first,
            dynamics,
            start,
            max_steps,
            ..
        } => cmd_solve_discrete(&mut report, &market, first, dynamics, start.as_deref(), max_steps),
        Command::Analyze {
            market,
            prop1,
            demand_type,
            tu_check,
            certificate,
            budget,
        } => {
            let none = !(prop1 || demand_type || tu_check || certificate);
            let sel = AnalyzeSelection {
                prop1: prop1 || none,
                demand_type: demand_type || none,
                tu_check: tu_check || none,
                certificate: certificate || none,
            };
            cmd_analyze(&mut report, &market, sel, budget)
        }
        Command::Roadmap { roadmap, market, budget } => cmd_roadmap(&mut report, &roadmap, &market, budget),
        Command::Gen(args) => cmd_gen(&mut report, &args),
    };
    if let Err(e) = result {
        report.exit_code = exit_code_for(&e);
        report.verdict = if report.exit_code == 3 { "budget exhausted" } else { "error" }.into();
        report.set("error", e.to_string());
    }
    report.elapsed_ms = started.elapsed().as_millis() as u64;
    report
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BudgetExhausted(_) => 3,
        _ => 2,
    }
}

/// `--budget`, else `MATCHKIT_BUDGET`, else the default.
pub fn resolve_budget(flag: Option<u64>) -> Result<u64> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(ENV_BUDGET) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Params(format!("{ENV_BUDGET}={s:?} is not a non-negative integer"))),
        Err(_) => Ok(crate::DEFAULT_BUDGET),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_market(report: &mut Report, path: &Path) -> Result<Market> {
    let text = read(path)?;
    report.input_digest = report::digest(&[text.as_bytes()]);
    parse_market(&text)
}

fn load_tu(report: &mut Report, path: &Path) -> Result<TuMarket> {
    match load_market(report, path)? {
        Market::Tu(m) => Ok(m),
        Market::Discrete(_) => Err(Error::Params("expected a tu market".into())),
    }
}

fn load_discrete(report: &mut Report, path: &Path) -> Result<DiscreteMarket> {
    match load_market(report, path)? {
        Market::Discrete(m) => Ok(m),
        Market::Tu(_) => Err(Error::Params("expected a discrete market".into())),
    }
}

fn kind_name(m: &Market) -> &'static str {
    match m {
        Market::Tu(_) => "tu",
        Market::Discrete(_) => "discrete",
    }
}

fn cycle_json(h: &FirmWorkerHypergraph, c: &HyperCycle) -> Value {
    let r = h.roster();
    json!({
        "label": c.label(h),
        "length": c.len(),
        "vertices": c.vertices.iter().map(|a| r.agent_name(*a)).collect::<Vec<_>>(),
        "edges": c.edges.iter().map(|&e| h.edge_label(e)).collect::<Vec<_>>(),
    })
}

fn matrix_json(m: &IntMatrix) -> Value {
    json!({
        "rows": m.row_labels(),
        "columns": m.col_labels(),
        "entries": m.entries(),
    })
}

pub fn cmd_balance(report: &mut Report, path: &Path, kind: Option<Kind>, budget: Option<u64>) -> Result<()> {
    let budget = resolve_budget(budget)?;
    let m = load_market(report, path)?;
    let actual = match m {
        Market::Tu(_) => Kind::Tu,
        Market::Discrete(_) => Kind::Discrete,
    };
    if kind.is_some_and(|k| k != actual) {
        return Err(Error::Params(format!("file holds a {} market", kind_name(&m))));
    }
    let h = FirmWorkerHypergraph::build(&m);
    report.set("kind", kind_name(&m));
    report.set("vertices", h.vertex_count());
    report.set("edges", h.edges().len());
    match h.check_balanced(budget)? {
        Balance::Balanced => {
            report.verdict = "balanced".into();
            report.exit_code = 0;
        }
        Balance::Unbalanced { witness } => {
            report.verdict = "unbalanced".into();
            report.exit_code = 1;
            report.set("witness", cycle_json(&h, &witness));
        }
    }
    Ok(())
}

pub fn cmd_solve_tu(report: &mut Report, path: &Path, emit: &[Emit]) -> Result<()> {
    let m = load_tu(report, path)?;
    let r = m.roster();
    let rep = find_stable_matching_tu(&m)?;
    report.set("lp_value", format_rational(&rep.lp_value));
    report.set("partition_value", format_rational(&rep.partition_value));
    let wants = |e: Emit| emit.is_empty() || emit.contains(&e);
    match &rep.outcome {
        TuOutcome::Stable(mu) => {
            report.verdict = "stable".into();
            report.exit_code = 0;
            if wants(Emit::Matching) {
                report.set("matching", tu_matching_to_json(r, mu));
                let u = m.utilities(mu)?;
                let utilities: Map<String, Value> = r
                    .agents()
                    .map(|a| (r.agent_name(a).to_string(), Value::String(format_rational(u.of(a)))))
                    .collect();
                report.set("utilities", utilities);
            }
        }
        TuOutcome::Unstable(d) => {
            report.verdict = "no stable matching".into();
            report.exit_code = 1;
            if wants(Emit::Certificate) {
                let weights: Vec<Value> = d
                    .weights
                    .iter()
                    .map(|(c, w)| json!({"coalition": c.label(r), "weight": format_rational(w)}))
                    .collect();
                report.set("certificate", json!({"weights": weights, "value": format_rational(&d.value)}));
            }
        }
    }
    if emit.contains(&Emit::Lp) {
        let primal: Map<String, Value> = r
            .agents()
            .map(|a| {
                let x = &rep.lp.primal[r.agent_index(a)];
                (r.agent_name(a).to_string(), Value::String(format_rational(x)))
            })
            .collect();
        let dual: Vec<Value> = rep
            .lp
            .dual
            .weights
            .iter()
            .map(|(c, w)| json!({"coalition": c.label(r), "weight": format_rational(w)}))
            .collect();
        let partition: Map<String, Value> = r
            .firms()
            .map(|f| (r.firm_name(f).to_string(), Value::String(r.set_label(rep.partition.firm_sets[f.0]))))
            .collect();
        report.set(
            "lp",
            json!({"primal": primal, "dual": dual, "pivots": rep.lp.pivots, "best_partition": partition}),
        );
    }
    Ok(())
}

pub fn cmd_solve_discrete(
    report: &mut Report,
    path: &Path,
    first: bool,
    dynamics: bool,
    start: Option<&Path>,
    max_steps: usize,
) -> Result<()> {
    let m = load_discrete(report, path)?;
    let r = m.roster();
    if dynamics {
        let start = match start {
            Some(p) => {
                let text = read(p)?;
                let market_text = read(path)?;
                report.input_digest = report::digest(&[market_text.as_bytes(), text.as_bytes()]);
                parse_discrete_matching(&text, r)?
            }
            None => DiscreteMatching::empty(r),
        };
        let t = run_blocking_dynamics(&m, &start, max_steps);
        report.set("states", t.states.iter().map(|s| s.label(r)).collect::<Vec<_>>());
        report.set("moves", t.moves.iter().map(|mv| mv.label(&m)).collect::<Vec<_>>());
        match t.outcome {
            DynamicsOutcome::StableAt(i) => {
                report.verdict = format!("stable at step {i}");
                report.exit_code = 0;
                report.set("outcome", json!({"stable_at": i}));
            }
            DynamicsOutcome::Cycle { first, second } => {
                report.verdict = format!("cycle: step {second} repeats step {first}");
                report.exit_code = 1;
                report.set("outcome", json!({"cycle": [first, second]}));
            }
            DynamicsOutcome::BudgetExhausted => {
                report.verdict = "step budget exhausted".into();
                report.exit_code = 3;
                report.set("outcome", json!({"budget_exhausted": max_steps}));
            }
        }
        return Ok(());
    }
    let mut all = enumerate_stable_matchings(&m)?;
    let total = all.len();
    if first {
        all.truncate(1);
    }
    report.set("count", total);
    report.set(
        "stable_matchings",
        all.iter().map(|mu| discrete_matching_to_json(r, mu)).collect::<Vec<_>>(),
    );
    report.set("labels", all.iter().map(|mu| mu.label(r)).collect::<Vec<_>>());
    if total > 0 {
        report.verdict = format!("{total} stable matching{}", if total == 1 { "" } else { "s" });
        report.exit_code = 0;
    } else {
        report.verdict = "no stable matching".into();
        report.exit_code = 1;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct AnalyzeSelection {
    pub prop1: bool,
    pub demand_type: bool,
    pub tu_check: bool,
    pub certificate: bool,
}

pub fn cmd_analyze(report: &mut Report, path: &Path, sel: AnalyzeSelection, budget: Option<u64>) -> Result<()> {
    let budget = resolve_budget(budget)?;
    let m = load_discrete(report, path)?;
    let h = FirmWorkerHypergraph::from_discrete(&m);
    let mut verdicts = Vec::new();
    let prop1 = if sel.prop1 || sel.certificate {
        Some(prop1_check(&m, budget)?)
    } else {
        None
    };
    if sel.prop1 {
        let p = prop1.as_ref().expect("computed");
        match p {
            Prop1Verdict::Guaranteed => {
                verdicts.push("existence guaranteed");
                report.set("prop1", json!({"guaranteed": true}));
            }
            Prop1Verdict::NotGuaranteed { witness } => {
                verdicts.push("existence not guaranteed");
                report.set("prop1", json!({"guaranteed": false, "witness": cycle_json(&h, witness)}));
            }
        }
    }
    if sel.demand_type || sel.tu_check {
        let d = demand_type(&m)?;
        if sel.demand_type {
            let per_firm: Map<String, Value> = m
                .roster()
                .firms()
                .map(|f| {
                    let vs: Vec<String> = d.per_firm[f.0].iter().map(|v| vector_label(v)).collect();
                    (m.roster().firm_name(f).to_string(), json!(vs))
                })
                .collect();
            report.set(
                "demand_type",
                json!({
                    "workers": d.workers,
                    "vectors": d.union.iter().map(|v| vector_label(v)).collect::<Vec<_>>(),
                    "per_firm": per_firm,
                }),
            );
        }
        if sel.tu_check {
            let mat = d.matrix();
            match is_totally_unimodular(&mat)? {
                TuVerdict::TotallyUnimodular => {
                    verdicts.push("demand type totally unimodular");
                    report.set("tu_check", json!({"totally_unimodular": true}));
                }
                TuVerdict::Violation { rows, cols, determinant } => {
                    verdicts.push("demand type not totally unimodular");
                    report.set(
                        "tu_check",
                        json!({
                            "totally_unimodular": false,
                            "rows": rows.iter().map(|&i| mat.row_labels()[i].clone()).collect::<Vec<_>>(),
                            "columns": cols.iter().map(|&j| mat.col_labels()[j].clone()).collect::<Vec<_>>(),
                            "determinant": determinant,
                        }),
                    );
                }
            }
        }
    }
    if sel.certificate {
        match prop1.as_ref().expect("computed") {
            Prop1Verdict::NotGuaranteed { witness } => {
                let c = tu_cycle_certificate(&m, witness)?;
                verdicts.push("determinant certificate built");
                report.set(
                    "certificate",
                    json!({
                        "cycle": cycle_json(&h, witness),
                        "m": matrix_json(&c.m),
                        "m_prime": matrix_json(&c.m_prime),
                        "m_double_prime": matrix_json(&c.m_double_prime),
                        "demand_vectors": c.demand_vectors.iter().map(|v| vector_label(v)).collect::<Vec<_>>(),
                        "determinant": c.determinant,
                    }),
                );
            }
            Prop1Verdict::Guaranteed => report.set("certificate", Value::Null),
        }
    }
    report.verdict = verdicts.join("; ");
    report.exit_code = 0;
    Ok(())
}

pub fn cmd_roadmap(report: &mut Report, roadmap: &Path, market: &Path, budget: Option<u64>) -> Result<()> {
    let budget = resolve_budget(budget)?;
    let rtext = read(roadmap)?;
    let mtext = read(market)?;
    report.input_digest = report::digest(&[rtext.as_bytes(), mtext.as_bytes()]);
    let raw = parse_roadmap(&rtext)?;
    let m = parse_market(&mtext)?;
    let rm = validate_roadmap(&raw, m.roster()).map_err(|v| {
        Error::Params(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
    })?;
    let rep = theorem3_report(&m, &rm, budget)?;
    let r = m.roster();
    report.set("specialists", rep.all_specialists());
    report.set(
        "non_specialists",
        rep.non_specialists.iter().map(|w| r.worker_name(*w)).collect::<Vec<_>>(),
    );
    match &rep.specialization {
        Specialization::Specialized { paths } => {
            report.set("specialized", true);
            let p: Map<String, Value> = r
                .firms()
                .map(|f| {
                    let v = match &paths[f.0] {
                        Some(p) => Value::String(p.label(&rm)),
                        None => Value::Null,
                    };
                    (r.firm_name(f).to_string(), v)
                })
                .collect();
            report.set("paths", p);
        }
        Specialization::NotSpecialized { reason } => {
            report.set("specialized", false);
            report.set("reason", reason.clone());
        }
    }
    let h = FirmWorkerHypergraph::build(&m);
    match &rep.balance {
        Balance::Balanced => report.set("balanced", true),
        Balance::Unbalanced { witness } => {
            report.set("balanced", false);
            report.set("witness", cycle_json(&h, witness));
        }
    }
    report.set("falsified", rep.falsified());
    report.verdict = if rep.holds() {
        "specialists, specialized, balanced".into()
    } else {
        let mut fails = Vec::new();
        if !rep.all_specialists() {
            fails.push("not all workers are specialists");
        }
        if !rep.specialization.is_specialized() {
            fails.push("firms not specialized");
        }
        if !rep.balance.is_balanced() {
            fails.push("unbalanced");
        }
        fails.join("; ")
    };
    report.exit_code = if rep.holds() { 0 } else { 1 };
    Ok(())
}

pub fn gen_params(args: &GenArgs) -> Result<GenParams> {
    Ok(GenParams {
        seed: args.seed,
        firm_count: args.firms,
        worker_count: args.workers,
        max_acceptable_sets_per_firm: args.max_sets,
        max_set_size: args.max_set_size,
        value_range: (parse_rational(&args.min_value)?, parse_rational(&args.max_value)?),
        acceptability_density: parse_rational(&args.density)?,
        technology_count: args.technologies,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Params(format!("{}: {e}", path.display())))
}

pub fn cmd_gen(report: &mut Report, args: &GenArgs) -> Result<()> {
    let p = gen_params(args).map_err(|e| Error::Params(e.to_string()))?;
    report.set("seed", p.seed);
    let (main, market): (Value, Option<Value>) = match args.kind {
        GenKind::Tu => (market_to_json(&Market::Tu(gen_tu_market(&p)?)), None),
        GenKind::Discrete => (market_to_json(&Market::Discrete(gen_discrete_market(&p)?)), None),
        GenKind::Roadmap => {
            let kind = match args.market_kind {
                Kind::Tu => InstanceKind::Tu,
                Kind::Discrete => InstanceKind::Discrete,
            };
            let (raw, m) = gen_roadmap_instance(&p, kind)?;
            (roadmap_to_json(&raw), Some(market_to_json(&m)))
        }
    };
    if market.is_some() && args.out.is_some() != args.market_out.is_some() {
        return Err(Error::Params("roadmap output needs both --out and --market-out".into()));
    }
    let main_text = to_text(&main);
    match &args.out {
        Some(path) => {
            write(path, &main_text)?;
            report.set("out", path.display().to_string());
        }
        None => report.set("instance", main.clone()),
    }
    if let Some(mk) = market {
        match &args.market_out {
            Some(path) => {
                write(path, &to_text(&mk))?;
                report.set("market_out", path.display().to_string());
            }
            None => report.set("market", mk),
        }
    }
    report.input_digest = report::digest(&[main_text.as_bytes()]);
    report.verdict = "generated".into();
    report.exit_code = 0;
    Ok(())
}
