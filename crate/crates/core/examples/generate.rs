// Seeded instances and a small sweep over them.
//
// `cargo run --example generate`

use std::fmt::Write;

use matchkit::discrete_solver::enumerate_stable_matchings;
use matchkit::generator::{gen_discrete_market, gen_roadmap_instance, gen_tu_market, GenParams, InstanceKind};
use matchkit::hypergraph::FirmWorkerHypergraph;
use matchkit::model::ratio;
use matchkit::roadmap::{theorem3_report, Roadmap};
use matchkit::tu_solver::find_stable_matching_tu;
use matchkit::DEFAULT_BUDGET;

fn run_example() -> matchkit::Result<String> {
    let mut out = String::new();
    let base = GenParams { acceptability_density: ratio(3, 4), max_set_size: 3, ..GenParams::default() };

    let (mut balanced, mut stable) = (0, 0);
    for seed in 0..100 {
        let m = gen_tu_market(&base.clone().with_seed(seed))?;
        let b = FirmWorkerHypergraph::from_tu(&m).check_balanced(DEFAULT_BUDGET)?.is_balanced();
        let s = find_stable_matching_tu(&m)?.is_stable();
        balanced += usize::from(b);
        stable += usize::from(s);
        assert!(!b || s);
    }
    writeln!(out, "TU: {balanced} balanced, {stable} stable of 100").unwrap();

    let (mut balanced, mut stable) = (0, 0);
    for seed in 0..100 {
        let m = gen_discrete_market(&base.clone().with_seed(seed))?;
        balanced += usize::from(FirmWorkerHypergraph::from_discrete(&m).check_balanced(DEFAULT_BUDGET)?.is_balanced());
        stable += usize::from(!enumerate_stable_matchings(&m)?.is_empty());
    }
    writeln!(out, "discrete: {balanced} balanced, {stable} with a stable matching of 100").unwrap();

    let (raw, m) = gen_roadmap_instance(&GenParams::default().with_seed(3), InstanceKind::Discrete)?;
    let r = Roadmap::new(&raw, m.roster())?;
    writeln!(out, "roadmap seed 3: {} technologies, holds {}", r.vertex_count(), theorem3_report(&m, &r, DEFAULT_BUDGET)?.holds()).unwrap();
    Ok(out)
}

fn main() -> matchkit::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
