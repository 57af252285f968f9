// Specialist workers and specialized firms over a technology roadmap.
//
// `cargo run --example roadmap`

use std::fmt::Write;

use matchkit::roadmap::{theorem3_report, RawRoadmap, Roadmap, Specialization};
use matchkit::{DiscreteMarket, Market, DEFAULT_BUDGET};

fn raw(techs: &[(&str, &[&str])], edges: &[(&str, &str)]) -> RawRoadmap {
    RawRoadmap {
        technologies: techs.iter().map(|(v, ws)| (v.to_string(), ws.iter().map(|w| w.to_string()).collect())).collect(),
        edges: edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    }
}

fn check(name: &str, m: &Market, rr: &RawRoadmap, out: &mut String) -> matchkit::Result<()> {
    let r = Roadmap::new(rr, m.roster())?;
    let rep = theorem3_report(m, &r, DEFAULT_BUDGET)?;
    let lazy: Vec<&str> = rep.non_specialists.iter().map(|w| m.roster().worker_name(*w)).collect();
    writeln!(out, "{name}: non-specialists {lazy:?}, balanced {}", rep.balance.is_balanced()).unwrap();
    match &rep.specialization {
        Specialization::Specialized { paths } => {
            for (f, p) in m.roster().firms().zip(paths) {
                let label = p.as_ref().map_or("-".to_string(), |p| p.label(&r));
                writeln!(out, "  {} on {label}", m.roster().firm_name(f)).unwrap();
            }
        }
        Specialization::NotSpecialized { reason } => writeln!(out, "  not specialized: {reason}").unwrap(),
    }
    Ok(())
}

fn run_example() -> matchkit::Result<String> {
    let mut out = String::new();
    let tree = raw(
        &[
            ("v1", &["w1"]),
            ("v2", &["w2", "w3"]),
            ("v3", &["w1", "w2"]),
            ("v4", &["w2", "w4"]),
            ("v5", &["w1", "w5"]),
            ("v6", &["w5"]),
        ],
        &[("v1", "v3"), ("v2", "v3"), ("v3", "v4"), ("v3", "v5"), ("v6", "v5")],
    );
    let m = Market::Discrete(
        DiscreteMarket::builder()
            .firm("f1", [vec!["w2", "w4"], vec!["w1"]])
            .firm("f2", [vec!["w2", "w3"]])
            .firm("f3", [vec!["w1", "w5"], vec!["w5"]])
            .worker("w1", ["f1", "f3"])
            .worker("w2", ["f1", "f2"])
            .worker("w3", ["f2"])
            .worker("w4", ["f1"])
            .worker("w5", ["f3"])
            .build()?,
    );
    check("six technologies", &m, &tree, &mut out)?;

    let split = Market::Discrete(
        DiscreteMarket::builder()
            .firm("f1", [vec!["w1", "w2"]])
            .firm("f2", [vec!["w1"], vec!["w2"]])
            .worker("w1", ["f1", "f2"])
            .worker("w2", ["f2", "f1"])
            .build()?,
    );
    let chain = raw(&[("v1", &["w1"]), ("v2", &["w2"]), ("v3", &["w1", "w2"])], &[("v1", "v2"), ("v2", "v3")]);
    check("chain", &split, &chain, &mut out)?;
    Ok(out)
}

fn main() -> matchkit::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
