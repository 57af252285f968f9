// Read and write the JSON market, matching and roadmap files, and drive
// the command layer in-process.
//
// `cargo run --example file_formats`

use std::fmt::Write;

use matchkit::cli::formats::{discrete_matching_to_json, market_to_json, parse_market, to_text};
use matchkit::cli::run_from_args;
use matchkit::discrete_solver::enumerate_stable_matchings;
use matchkit::Market;

const MARRIAGE: &str = r#"{
  "kind": "discrete",
  "firms": {"w1": [["m2"], ["m1"]], "w2": [["m1"], ["m2"]]},
  "workers": {"m1": ["w1", "w2"], "m2": ["w2", "w1"]}
}"#;

fn run_example() -> matchkit::Result<String> {
    let mut out = String::new();
    let market = parse_market(MARRIAGE)?;
    let text = to_text(&market_to_json(&market));
    assert_eq!(parse_market(&text)?, market);
    out.push_str(&text);

    if let Market::Discrete(m) = &market {
        for mu in enumerate_stable_matchings(m)? {
            out.push_str(&to_text(&discrete_matching_to_json(m.roster(), &mu)));
        }
    }

    let dir = std::env::temp_dir().join(format!("matchkit-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("marriage.json");
    std::fs::write(&path, &text)?;
    let (code, stdout, _) = run_from_args(["matchkit", "balance", path.to_str().unwrap()]);
    writeln!(out, "balance exit {code}").unwrap();
    out.push_str(&stdout);
    std::fs::remove_dir_all(&dir)?;
    Ok(out)
}

fn main() -> matchkit::Result<()> {
    print!("{}", run_example()?);
    Ok(())
}
