// Choice-function analysis: the refined cycle condition, demand types,
// total unimodularity and the determinant certificate.
//
// `cargo run --example analyze`

use std::fmt::Write;

use matchkit::analysis::{
    demand_type, is_totally_unimodular, prop1_check, tu_cycle_certificate, vector_label, Prop1Verdict, TuVerdict,
};
use matchkit::{DiscreteMarket, DEFAULT_BUDGET};

fn report(name: &str, m: &DiscreteMarket, out: &mut String) -> matchkit::Result<()> {
    let d = demand_type(m)?;
    let vectors: Vec<String> = d.union.iter().map(|v| vector_label(v)).collect();
    writeln!(out, "{name}: demand type {{{}}}", vectors.join(", ")).unwrap();
    match is_totally_unimodular(&d.matrix())? {
        TuVerdict::TotallyUnimodular => writeln!(out, "  totally unimodular").unwrap(),
        TuVerdict::Violation { rows, cols, determinant } => {
            writeln!(out, "  rows {rows:?} cols {cols:?} have determinant {determinant}").unwrap()
        }
    }
    match prop1_check(m, DEFAULT_BUDGET)? {
        Prop1Verdict::Guaranteed => writeln!(out, "  a stable matching is guaranteed").unwrap(),
        Prop1Verdict::NotGuaranteed { witness } => {
            let cert = tu_cycle_certificate(m, &witness)?;
            writeln!(out, "  qualifying cycle; certificate rows {:?}", cert.m_double_prime.row_labels()).unwrap();
            for row in cert.m_double_prime.entries() {
                writeln!(out, "    {row:?}").unwrap();
            }
            writeln!(out, "  determinant {}", cert.determinant).unwrap();
        }
    }
    Ok(())
}

fn run_example() -> matchkit::Result<String> {
    let mut out = String::new();
    let nested = DiscreteMarket::builder()
        .firm("f1", [vec!["w1", "w2"]])
        .firm("f2", [vec!["w1", "w2"], vec!["w1"], vec!["w2"]])
        .worker("w1", ["f1", "f2"])
        .worker("w2", ["f2", "f1"])
        .build()?;
    report("nested", &nested, &mut out)?;
    let split = DiscreteMarket::builder()
        .firm("f1", [vec!["w1", "w2"]])
        .firm("f2", [vec!["w1"], vec!["w2"]])
        .worker("w1", ["f1", "f2"])
        .worker("w2", ["f2", "f1"])
        .build()?;
    report("split", &split, &mut out)?;
    Ok(out)
}

fn main() -> matchkit::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
