//! One line per acceptance criterion; exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use matchkit::analysis::{
    demand_type, determinant, is_totally_unimodular, prop1_check, prop2_relation, tu_cycle_certificate,
    Prop1Verdict, TuVerdict,
};
use matchkit::discrete_solver::{
    check_stable_discrete, enumerate_stable_matchings, run_blocking_dynamics, DynamicsOutcome,
};
use matchkit::generator::{gen_discrete_market, gen_roadmap_instance, gen_tu_market, GenParams, InstanceKind, XorShift64Star};
use matchkit::hypergraph::{Balance, CycleFilter, FirmWorkerHypergraph, IntMatrix};
use matchkit::model::{int, AgentId};
use matchkit::roadmap::{check_specialized, theorem3_report, Roadmap};
use matchkit::tu_solver::{
    check_stable_tu, find_stable_matching_tu, max_partition_value, SizeGuard, TuLpProblem, TuOutcome,
};
use matchkit::{DiscreteMatching, Rational, TuMarket, DEFAULT_BUDGET};

/// Wall-clock limits.
const SMALL_RUNTIME: Duration = Duration::from_secs(1);
const SUITE_RUNTIME: Duration = Duration::from_secs(300);
/// Instance counts for the seeded suites.
const SUITE_SIZE: usize = 500;
const UNIT_DEMAND_SEEDS: u64 = 1000;
const DYNAMICS_STEPS: usize = 8;
const MATRIX_TRIALS: usize = 200;
/// Seeds tried while collecting balanced instances.
const SEED_CAP: u64 = 50_000;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn c1_two_firm_tu() -> Outcome {
    let m = tu("intro_tu.json");
    let start = Instant::now();
    let rep = ok(find_stable_matching_tu(&m))?;
    let took = start.elapsed();
    ensure!(!rep.is_stable(), "reported stable");
    ensure!(rep.lp_value == int(7), "lp value {}", rep.lp_value);
    ensure!(rep.partition_value == int(6), "partition value {}", rep.partition_value);
    ensure!(took < SMALL_RUNTIME, "took {took:?}");
    Ok(format!("unstable, lp 7, partition 6, {took:?}"))
}

fn c2_two_firm_discrete() -> Outcome {
    let m = discrete("intro_discrete.json");
    ensure!(ok(enumerate_stable_matchings(&m))?.is_empty(), "found a stable matching");
    let h = FirmWorkerHypergraph::from_discrete(&m);
    let len = match ok(h.check_balanced(DEFAULT_BUDGET))? {
        Balance::Unbalanced { witness } => witness.len(),
        Balance::Balanced => return Err("balanced".into()),
    };
    ensure!(len == 3, "witness length {len}");
    let start = ok(DiscreteMatching::from_names(m.roster(), &[("f1", &["w1", "w2"])]))?;
    let trace = run_blocking_dynamics(&m, &start, DYNAMICS_STEPS);
    let second = match trace.outcome {
        DynamicsOutcome::Cycle { second, .. } => second,
        o => return Err(format!("dynamics ended with {o:?}")),
    };
    ensure!(second <= DYNAMICS_STEPS, "cycle closed at step {second}");
    Ok(format!("no stable matching, 3-edge witness, cycle closes at step {second}"))
}

fn c3_three_firm_tu() -> Outcome {
    let m = tu("example1_tu.json");
    let h = FirmWorkerHypergraph::from_tu(&m);
    ensure!(ok(h.check_balanced(DEFAULT_BUDGET))?.is_balanced(), "unbalanced");
    let odd: Vec<_> = ok(h.enumerate_cycles(CycleFilter::all(h.vertex_count()), DEFAULT_BUDGET))?
        .into_iter()
        .filter(|c| c.len() % 2 == 1)
        .collect();
    ensure!(odd.len() == 1, "{} odd cycles", odd.len());
    let c = &odd[0];
    ensure!(!h.is_nontrivial_odd(c), "odd cycle is nontrivial");
    let r = m.roster();
    let big = c
        .edges
        .iter()
        .copied()
        .find(|&e| h.edge_label(e) == "{f1,w1,w2}")
        .ok_or("cycle misses {f1,w1,w2}")?;
    let met = c.vertices.iter().filter(|v| h.edges()[big].contains(**v)).count();
    ensure!(met == 3, "{{f1,w1,w2}} meets {met} cycle vertices");
    let rep = ok(find_stable_matching_tu(&m))?;
    let mu = rep.matching().ok_or("no stable matching")?;
    let prices: Vec<Rational> = r.workers().map(|w| mu.price(w).clone()).collect();
    ensure!(prices == vec![int(2), int(1), int(1)], "prices {prices:?}");
    ensure!(check_stable_tu(&m, mu).is_stable(), "check_stable_tu disagrees");
    let u = ok(m.utilities(mu))?;
    for w in r.workers() {
        let expect = mu.price(w) + m.worker_value(w, mu.firm_of(w)).unwrap();
        ensure!(*u.of(AgentId::Worker(w)) == expect, "utility of {}", r.worker_name(w));
    }
    for f in r.firms() {
        ensure!(*u.of(AgentId::Firm(f)) == rep.lp.primal[r.agent_index(AgentId::Firm(f))], "firm utility");
    }
    Ok("balanced, one trivial odd cycle, prices (2,1,1)".into())
}

fn c4_profile_eleven() -> Outcome {
    let m = discrete("example2_discrete.json");
    let mu = ok(DiscreteMatching::from_names(m.roster(), &[("f1", &["w1", "w2"]), ("f2", &["w3"])]))?;
    ensure!(check_stable_discrete(&m, &mu).is_stable(), "listed matching not stable");
    let all = ok(enumerate_stable_matchings(&m))?;
    ensure!(!all.is_empty(), "enumeration empty");
    ensure!(all.contains(&mu), "enumeration misses the listed matching");
    Ok(format!("listed matching stable, {} stable in total", all.len()))
}

fn c5_profile_twelve() -> Outcome {
    let m = discrete("example3_discrete.json");
    ensure!(ok(prop1_check(&m, DEFAULT_BUDGET))?.is_guaranteed(), "not guaranteed");
    let d = ok(demand_type(&m))?;
    let mut got = d.union.clone();
    got.sort();
    let mut want = vec![vec![1, 1], vec![1, 0], vec![0, 1]];
    want.sort();
    ensure!(got == want, "demand type {got:?}");
    ensure!(ok(is_totally_unimodular(&d.matrix()))?.is_totally_unimodular(), "not TU");
    Ok("guaranteed; D = {(1,1),(1,0),(0,1)}, totally unimodular".into())
}

fn c6_market_one_certificate() -> Outcome {
    let m = discrete("intro_discrete.json");
    let d = ok(demand_type(&m))?;
    let mut got = d.union.clone();
    got.sort();
    let mut want = vec![vec![1, 1], vec![1, 0], vec![0, 1], vec![1, -1]];
    want.sort();
    ensure!(got == want, "demand type {got:?}");
    let det = match ok(is_totally_unimodular(&d.matrix()))? {
        TuVerdict::Violation { rows, cols, determinant } => {
            ensure!(rows.len() == 2 && cols.len() == 2, "violation is {}x{}", rows.len(), cols.len());
            determinant
        }
        TuVerdict::TotallyUnimodular => return Err("reported TU".into()),
    };
    ensure!(det.abs() == 2, "violation determinant {det}");
    let witness = match ok(prop1_check(&m, DEFAULT_BUDGET))? {
        Prop1Verdict::NotGuaranteed { witness } => witness,
        Prop1Verdict::Guaranteed => return Err("prop1 guaranteed".into()),
    };
    let cert = ok(tu_cycle_certificate(&m, &witness))?;
    let mpp = &cert.m_double_prime;
    ensure!(mpp.row_labels() == ["w1", "w2"], "rows {:?}", mpp.row_labels());
    ensure!(mpp.entries() == [vec![1, 1], vec![-1, 1]], "M'' {:?}", mpp.entries());
    ensure!(cert.determinant.abs() == 2, "certificate determinant {}", cert.determinant);
    Ok("D has (1,-1); 2x2 violation |det| 2; M'' = [[1,1],[-1,1]]".into())
}

fn c7_odd_cycle_yet_stable() -> Outcome {
    let t = tu("appendixC_tu.json");
    let d = discrete("appendixC_discrete.json");
    for h in [FirmWorkerHypergraph::from_tu(&t), FirmWorkerHypergraph::from_discrete(&d)] {
        let w = match ok(h.check_balanced(DEFAULT_BUDGET))? {
            Balance::Unbalanced { witness } => witness,
            Balance::Balanced => return Err("balanced".into()),
        };
        let r = h.roster();
        let mut names: Vec<&str> = w.vertices.iter().map(|a| r.agent_name(*a)).collect();
        names.sort();
        ensure!(names == ["w1", "w2", "w3"], "witness vertices {names:?}");
        ensure!(w.len() == 3, "witness length {}", w.len());
    }
    let rep = ok(find_stable_matching_tu(&t))?;
    let mu = rep.matching().ok_or("TU instance unstable")?;
    ensure!(check_stable_tu(&t, mu).is_stable(), "TU matching fails the check");
    let all = ok(enumerate_stable_matchings(&d))?;
    ensure!(!all.is_empty(), "discrete instance has no stable matching");
    Ok(format!("odd cycle (w1,w2,w3); TU stable; {} discrete stable", all.len()))
}

fn c8_unit_demand() -> Outcome {
    let m = discrete("marriage.json");
    let all = ok(enumerate_stable_matchings(&m))?;
    let labels: Vec<String> = all.iter().map(|x| x.label(m.roster())).collect();
    ensure!(labels == ["w1:{m1} w2:{m2}", "w1:{m2} w2:{m1}"], "stable set {labels:?}");
    for seed in 0..UNIT_DEMAND_SEEDS {
        let p = GenParams { max_set_size: 1, ..small_params(seed) };
        let h = if seed % 2 == 0 {
            FirmWorkerHypergraph::from_discrete(&ok(gen_discrete_market(&p))?)
        } else {
            FirmWorkerHypergraph::from_tu(&ok(gen_tu_market(&p))?)
        };
        ensure!(ok(h.check_balanced(DEFAULT_BUDGET))?.is_balanced(), "seed {seed} unbalanced");
    }
    Ok(format!("two stable matchings; {UNIT_DEMAND_SEEDS} unit-demand markets balanced"))
}

fn c9_balanced_tu_suite() -> Outcome {
    let start = Instant::now();
    let (mut found, mut seed) = (0, 0);
    while found < SUITE_SIZE {
        ensure!(seed < SEED_CAP, "only {found} balanced instances below seed {SEED_CAP}");
        let m = ok(gen_tu_market(&small_params(seed)))?;
        if ok(FirmWorkerHypergraph::from_tu(&m).check_balanced(DEFAULT_BUDGET))?.is_balanced() {
            let rep = ok(find_stable_matching_tu(&m))?;
            ensure!(rep.is_stable(), "seed {seed}: balanced but unstable");
            found += 1;
        }
        seed += 1;
    }
    let took = start.elapsed();
    ensure!(took < SUITE_RUNTIME, "took {took:?}");
    Ok(format!("{found} balanced TU markets all stable ({seed} seeds, {took:?})"))
}

fn c10_balanced_discrete_suite() -> Outcome {
    let (mut found, mut seed) = (0, 0);
    while found < SUITE_SIZE {
        ensure!(seed < SEED_CAP, "only {found} balanced instances below seed {SEED_CAP}");
        let m = ok(gen_discrete_market(&small_params(seed)))?;
        if ok(FirmWorkerHypergraph::from_discrete(&m).check_balanced(DEFAULT_BUDGET))?.is_balanced() {
            ensure!(!ok(enumerate_stable_matchings(&m))?.is_empty(), "seed {seed}: no stable matching");
            found += 1;
        }
        seed += 1;
    }
    Ok(format!("{found} balanced discrete markets all have stable matchings ({seed} seeds)"))
}

fn c11_demand_type_suite() -> Outcome {
    let (mut tu_count, mut not_guaranteed) = (0, 0);
    for seed in 0..SUITE_SIZE as u64 {
        let m = ok(gen_discrete_market(&small_params(seed)))?;
        let rep = ok(prop2_relation(&m, DEFAULT_BUDGET))?;
        ensure!(!rep.falsified(), "seed {seed}: TU demand type with a qualifying cycle");
        tu_count += usize::from(rep.tu.is_totally_unimodular());
        if let Prop1Verdict::NotGuaranteed { witness } = &rep.prop1 {
            not_guaranteed += 1;
            let cert = ok(tu_cycle_certificate(&m, witness))?;
            ensure!(cert.determinant.abs() == 2, "seed {seed}: certificate determinant {}", cert.determinant);
        }
    }
    Ok(format!("{SUITE_SIZE} markets: {tu_count} TU, {not_guaranteed} not guaranteed, none both"))
}

fn c12_roadmap_suite() -> Outcome {
    for seed in 0..SUITE_SIZE as u64 {
        let firms = 1 + (seed % 4) as usize;
        let p = GenParams {
            firm_count: firms,
            worker_count: firms + ((seed / 4) as usize % (7 - firms)),
            max_set_size: 1,
            ..GenParams::default().with_seed(seed)
        };
        let kind = if seed % 2 == 0 { InstanceKind::Discrete } else { InstanceKind::Tu };
        let (raw, m) = ok(gen_roadmap_instance(&p, kind))?;
        let r = ok(Roadmap::new(&raw, m.roster()))?;
        let rep = ok(theorem3_report(&m, &r, DEFAULT_BUDGET))?;
        ensure!(rep.all_specialists(), "seed {seed}: non-specialists");
        ensure!(check_specialized(&m, &r).is_specialized(), "seed {seed}: not specialized");
        ensure!(rep.balance.is_balanced(), "seed {seed}: unbalanced");
    }
    Ok(format!("{SUITE_SIZE} roadmap instances: specialists, specialized, balanced"))
}

fn lp_consistent(m: &TuMarket) -> Result<(), String> {
    let rep = ok(find_stable_matching_tu(m))?;
    let lp = TuLpProblem::from_market(m);
    let x = &rep.lp.primal;
    ensure!(lp.is_primal_feasible(x), "primal infeasible");
    ensure!(lp.is_dual_feasible(&rep.lp.dual), "dual infeasible");
    let primal: Rational = x.iter().sum();
    ensure!(primal == rep.lp.dual.value, "primal {primal} vs dual {}", rep.lp.dual.value);
    ensure!(lp.dual_value(&rep.lp.dual) == rep.lp.value, "dual objective mismatch");
    for (c, weight) in &rep.lp.dual.weights {
        if *weight > int(0) {
            let v = ok(m.coalition_value(c))?;
            ensure!(lp.coverage(c, x) == v, "slack on a weighted coalition");
        }
    }
    let brute = best_partition_oracle(m);
    ensure!(brute <= rep.lp_value, "partition {brute} above lp {}", rep.lp_value);
    ensure!(brute == rep.partition_value, "partition {} vs oracle {brute}", rep.partition_value);
    ensure!(brute == ok(max_partition_value(m, &SizeGuard::default()))?.value, "partition search");
    match &rep.outcome {
        TuOutcome::Stable(mu) => ensure!(check_stable_tu(m, mu).is_stable(), "stable claim fails"),
        TuOutcome::Unstable(d) => ensure!(d.value > rep.partition_value, "weak certificate"),
    }
    Ok(())
}

fn c13_lp_consistency() -> Outcome {
    let mut solved = 0;
    for name in ["intro_tu.json", "example1_tu.json", "appendixC_tu.json"] {
        lp_consistent(&tu(name)).map_err(|e| format!("{name}: {e}"))?;
        solved += 1;
    }
    for seed in 0..SUITE_SIZE as u64 {
        let mut p = small_params(seed);
        p.worker_count = p.worker_count.min(5);
        p.max_set_size = p.max_set_size.min(p.worker_count);
        lp_consistent(&ok(gen_tu_market(&p))?).map_err(|e| format!("seed {seed}: {e}"))?;
        solved += 1;
    }
    Ok(format!("{solved} LPs: equal values, slackness, partition oracle agrees"))
}

fn c14_determinant_oracle() -> Outcome {
    let mut rng = XorShift64Star::new(14);
    let mut violations = 0;
    for trial in 0..MATRIX_TRIALS {
        let (rows, cols) = (1 + rng.index(4), 1 + rng.index(4));
        let a: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.index(3) as i64 - 1).collect())
            .collect();
        for k in 1..=rows.min(cols) {
            for rs in subsets(rows, k) {
                for cs in subsets(cols, k) {
                    let sub = minor(&a, &rs, &cs);
                    ensure!(determinant(&sub) == cofactor_det(&sub), "trial {trial}: determinants differ on {sub:?}");
                }
            }
        }
        let labels = |n: usize, p: &str| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let mat = ok(IntMatrix::new(labels(rows, "r"), labels(cols, "c"), a.clone()))?;
        let verdict = ok(is_totally_unimodular(&mat))?;
        ensure!(verdict.is_totally_unimodular() == cofactor_tu(&a), "trial {trial}: verdicts differ on {a:?}");
        if let TuVerdict::Violation { determinant: d, .. } = verdict {
            ensure!(d.abs() > 1, "trial {trial}: reported determinant {d}");
            violations += 1;
        }
    }
    Ok(format!("{MATRIX_TRIALS} matrices agree ({violations} not TU)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("C1  two-firm TU market has no stable matching", c1_two_firm_tu),
        ("C2  two-firm discrete market: none stable, odd cycle, dynamics cycle", c2_two_firm_discrete),
        ("C3  three-firm TU market: balanced, prices (2,1,1)", c3_three_firm_tu),
        ("C4  three-firm discrete market: listed matching stable", c4_profile_eleven),
        ("C5  nested-set market: guaranteed and TU demand type", c5_profile_twelve),
        ("C6  demand type and determinant certificate", c6_market_one_certificate),
        ("C7  odd cycle without instability", c7_odd_cycle_yet_stable),
        ("C8  unit-demand markets", c8_unit_demand),
        ("C9  balanced TU suite", c9_balanced_tu_suite),
        ("C10 balanced discrete suite", c10_balanced_discrete_suite),
        ("C11 demand type vs cycle condition suite", c11_demand_type_suite),
        ("C12 roadmap suite", c12_roadmap_suite),
        ("C13 LP self-consistency", c13_lp_consistency),
        ("C14 determinant oracle equivalence", c14_determinant_oracle),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(note) => println!("PASS {name}: {note}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.push(name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
