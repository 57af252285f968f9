// Decide existence in markets with transfers and read off prices or the
// dual certificate.
//
// `cargo run --example solve_tu`

use std::fmt::Write;

use matchkit::tu_solver::{check_stable_tu, find_stable_matching_tu, TuOutcome};
use matchkit::{AgentId, TuMarket};

fn describe(name: &str, m: &TuMarket, out: &mut String) -> matchkit::Result<()> {
    let r = m.roster();
    let rep = find_stable_matching_tu(m)?;
    writeln!(out, "{name}: lp {} / best partition {}", rep.lp_value, rep.partition_value).unwrap();
    match &rep.outcome {
        TuOutcome::Stable(mu) => {
            let u = m.utilities(mu)?;
            for w in r.workers() {
                let firm = mu.firm_of(w).map_or("-", |f| r.firm_name(f));
                writeln!(
                    out,
                    "  {} at {firm}, price {}, utility {}",
                    r.worker_name(w),
                    mu.price(w),
                    u.of(AgentId::Worker(w))
                )
                .unwrap();
            }
            writeln!(out, "  independent check: stable = {}", check_stable_tu(m, mu).is_stable()).unwrap();
        }
        TuOutcome::Unstable(dual) => {
            for (c, weight) in &dual.weights {
                writeln!(out, "  weight {weight} on {}", c.label(r)).unwrap();
            }
            writeln!(out, "  fractional cover worth {}", dual.value).unwrap();
        }
    }
    Ok(())
}

fn run_example() -> matchkit::Result<String> {
    let mut out = String::new();
    let no_core = TuMarket::builder()
        .firm("f1", [(vec!["w1", "w2"], 6)])
        .firm("f2", [(vec!["w1"], 4), (vec!["w2"], 4)])
        .worker("w1", [("f1", 0), ("f2", 0)])
        .worker("w2", [("f1", 0), ("f2", 0)])
        .build()?;
    describe("two firms", &no_core, &mut out)?;

    let wages = TuMarket::builder()
        .firm("f1", [(vec!["w1", "w2"], 3), (vec!["w1"], 1)])
        .firm("f2", [(vec!["w1"], 2), (vec!["w3"], 1)])
        .firm("f3", [(vec!["w2", "w3"], 2)])
        .wage_worker("w1")
        .wage_worker("w2")
        .wage_worker("w3")
        .build()?;
    describe("three firms", &wages, &mut out)?;
    Ok(out)
}

fn main() -> matchkit::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
