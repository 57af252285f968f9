// Build two markets with the builders and check their hypergraphs.
//
// `cargo run --example balance`

use std::fmt::Write;

use matchkit::hypergraph::{Balance, CycleFilter, FirmWorkerHypergraph};
use matchkit::{DiscreteMarket, TuMarket, DEFAULT_BUDGET};

fn run_example() -> matchkit::Result<String> {
    let mut out = String::new();

    // f1 wants both workers together, f2 wants either one alone.
    let two_firms = DiscreteMarket::builder()
        .firm("f1", [vec!["w1", "w2"]])
        .firm("f2", [vec!["w1"], vec!["w2"]])
        .worker("w1", ["f1", "f2"])
        .worker("w2", ["f2", "f1"])
        .build()?;
    let h = FirmWorkerHypergraph::from_discrete(&two_firms);
    match h.check_balanced(DEFAULT_BUDGET)? {
        Balance::Balanced => writeln!(out, "two firms: balanced").unwrap(),
        Balance::Unbalanced { witness } => {
            writeln!(out, "two firms: unbalanced, witness {}", witness.label(&h)).unwrap()
        }
    }
    let m = h.incidence_matrix();
    writeln!(out, "incidence columns {:?}", m.col_labels()).unwrap();

    let three_firms = TuMarket::builder()
        .firm("f1", [(vec!["w1", "w2"], 3), (vec!["w1"], 1)])
        .firm("f2", [(vec!["w1"], 2), (vec!["w3"], 1)])
        .firm("f3", [(vec!["w2", "w3"], 2)])
        .wage_worker("w1")
        .wage_worker("w2")
        .wage_worker("w3")
        .build()?;
    let h = FirmWorkerHypergraph::from_tu(&three_firms);
    let balanced = h.check_balanced(DEFAULT_BUDGET)?.is_balanced();
    writeln!(out, "three firms: balanced = {balanced}").unwrap();
    for c in h.enumerate_cycles(CycleFilter::all(h.vertex_count()), DEFAULT_BUDGET)? {
        let kind = if h.is_nontrivial_odd(&c) { "nontrivial odd" } else if c.len() % 2 == 1 { "odd" } else { "even" };
        writeln!(out, "  {kind} cycle {}", c.label(&h)).unwrap();
    }
    Ok(out)
}

fn main() -> matchkit::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
