// Stable matchings without transfers: enumeration, blocking coalitions
// and blocking dynamics.
//
// `cargo run --example solve_discrete`

use std::fmt::Write;

use matchkit::discrete_solver::{
    enumerate_stable_matchings, find_blocking_coalition, run_blocking_dynamics, DynamicsOutcome,
};
use matchkit::{DiscreteMarket, DiscreteMatching};

fn run_example() -> matchkit::Result<String> {
    let mut out = String::new();
    let m = DiscreteMarket::builder()
        .firm("f1", [vec!["w1", "w2"], vec!["w1"]])
        .firm("f2", [vec!["w1"], vec!["w3"]])
        .firm("f3", [vec!["w2", "w3"]])
        .worker("w1", ["f1", "f2"])
        .worker("w2", ["f3", "f1"])
        .worker("w3", ["f2", "f3"])
        .build()?;
    let r = m.roster();
    for mu in enumerate_stable_matchings(&m)? {
        writeln!(out, "stable: {}", mu.label(r)).unwrap();
    }
    let other = DiscreteMatching::from_names(r, &[("f2", &["w1"]), ("f3", &["w2", "w3"])])?;
    if let Some(b) = find_blocking_coalition(&m, &other) {
        writeln!(out, "{} is blocked by {}", other.label(r), b.label(&m)).unwrap();
    }

    let cyclic = DiscreteMarket::builder()
        .firm("f1", [vec!["w1", "w2"]])
        .firm("f2", [vec!["w1"], vec!["w2"]])
        .worker("w1", ["f1", "f2"])
        .worker("w2", ["f2", "f1"])
        .build()?;
    let start = DiscreteMatching::from_names(cyclic.roster(), &[("f1", &["w1", "w2"])])?;
    let trace = run_blocking_dynamics(&cyclic, &start, 20);
    for (i, s) in trace.states.iter().enumerate() {
        let step = trace.moves.get(i).map(|mv| mv.label(&cyclic)).unwrap_or_default();
        writeln!(out, "  {i}: {:<18} {step}", s.label(cyclic.roster())).unwrap();
    }
    if let DynamicsOutcome::Cycle { first, second } = trace.outcome {
        writeln!(out, "state {second} repeats state {first}").unwrap();
    }
    Ok(out)
}

fn main() -> matchkit::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
