//! Every cargo example, compiled in as a module and run once.

macro_rules! example {
    ($name:ident, $file:literal, $($expect:literal),+) => {
        mod $name {
            #![allow(dead_code)]
            include!(concat!("../examples/", $file));

            #[test]
            fn runs() {
                let out = run_example().unwrap();
                $(assert!(out.contains($expect), "{out}");)+
            }
        }
    };
}

example!(balance, "balance.rs", "two firms: unbalanced", "three firms: balanced = true");
example!(solve_tu, "solve_tu.rs", "lp 7 / best partition 6", "w1 at f2, price 2");
example!(solve_discrete, "solve_discrete.rs", "stable: f1:{w1,w2} f2:{w3}", "state 4 repeats state 0");
example!(analyze, "analyze.rs", "nested: demand type {(1,1), (1,0), (0,1)}", "determinant 2");
example!(roadmap, "roadmap.rs", "f1 on v1->v3->v4", "chain: non-specialists [\"w1\"]");
example!(generate, "generate.rs", "roadmap seed 3", "holds true");
example!(file_formats, "file_formats.rs", "balance exit 0", "\"assignment\"");
