#![allow(dead_code)]

use std::path::PathBuf;

use matchkit::cli::formats::{parse_market, parse_roadmap};
use matchkit::generator::GenParams;
use matchkit::hypergraph::FirmWorkerHypergraph;
use matchkit::model::{int, ratio, FirmId, WorkerSet};
use matchkit::roadmap::Roadmap;
use matchkit::{Coalition, DiscreteMarket, Market, Rational, TuMarket, WorkerId};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn market(name: &str) -> Market {
    parse_market(&fixture_text(name)).unwrap()
}

pub fn discrete(name: &str) -> DiscreteMarket {
    match market(name) {
        Market::Discrete(m) => m,
        Market::Tu(_) => panic!("{name} is a TU market"),
    }
}

pub fn tu(name: &str) -> TuMarket {
    match market(name) {
        Market::Tu(m) => m,
        Market::Discrete(_) => panic!("{name} is a discrete market"),
    }
}

pub fn roadmap(name: &str, m: &Market) -> Roadmap {
    Roadmap::new(&parse_roadmap(&fixture_text(name)).unwrap(), m.roster()).unwrap()
}

/// Small markets with sizes and densities drawn from the seed.
pub fn small_params(seed: u64) -> GenParams {
    let firms = 1 + (seed % 4) as usize;
    let workers = 1 + ((seed / 4) % 6) as usize;
    let densities = [int(1), ratio(3, 4), ratio(1, 2)];
    GenParams {
        seed,
        firm_count: firms,
        worker_count: workers,
        max_acceptable_sets_per_firm: 1 + ((seed / 24) % 4) as usize,
        max_set_size: workers.min(1 + ((seed / 96) % 3) as usize),
        value_range: (int(-2), int(10)),
        acceptability_density: densities[((seed / 7) % 3) as usize].clone(),
        technology_count: None,
    }
}

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_det(a: &[Vec<i64>]) -> i64 {
    match a.len() {
        0 => 1,
        1 => a[0][0],
        n => (0..n)
            .filter(|&j| a[0][j] != 0)
            .map(|j| {
                let minor: Vec<Vec<i64>> = a[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * a[0][j] * cofactor_det(&minor)
            })
            .sum(),
    }
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

pub fn minor(a: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> Vec<Vec<i64>> {
    rows.iter().map(|&r| cols.iter().map(|&c| a[r][c]).collect()).collect()
}

/// Total unimodularity by cofactor expansion of every square submatrix.
pub fn cofactor_tu(a: &[Vec<i64>]) -> bool {
    let (r, c) = (a.len(), a.first().map_or(0, |x| x.len()));
    (1..=r.min(c)).all(|k| {
        subsets(r, k)
            .iter()
            .all(|rs| subsets(c, k).iter().all(|cs| cofactor_det(&minor(a, rs, cs)).abs() <= 1))
    })
}

/// A 0/1 matrix is balanced iff no odd-order square submatrix has every row
/// and column sum equal to two.
pub fn balanced_oracle(h: &FirmWorkerHypergraph) -> bool {
    let a = h.incidence_matrix().entries().to_vec();
    let (r, c) = (a.len(), a.first().map_or(0, |x| x.len()));
    let mut k = 3;
    while k <= r.min(c) {
        for rs in subsets(r, k) {
            let live: Vec<usize> = (0..c)
                .filter(|&j| {
                    let s: i64 = rs.iter().map(|&i| a[i][j]).sum();
                    s == 2
                })
                .collect();
            if live.len() < k {
                continue;
            }
            for pick in subsets(live.len(), k) {
                let cs: Vec<usize> = pick.iter().map(|&p| live[p]).collect();
                if rs.iter().all(|&i| cs.iter().map(|&j| a[i][j]).sum::<i64>() == 2) {
                    return false;
                }
            }
        }
        k += 2;
    }
    true
}

/// Rank of `s` in the firm's list; `len` for the empty set, `usize::MAX` for
/// sets the firm does not list.
fn firm_rank(m: &DiscreteMarket, f: FirmId, s: WorkerSet) -> usize {
    let prefs = m.firm_prefs(f);
    if s.is_empty() {
        return prefs.len();
    }
    prefs.iter().position(|x| *x == s).unwrap_or(usize::MAX)
}

fn worker_rank(m: &DiscreteMarket, w: WorkerId, f: Option<FirmId>) -> usize {
    let prefs = m.worker_prefs(w);
    match f {
        None => prefs.len(),
        Some(f) => prefs.iter().position(|g| *g == f).unwrap_or(usize::MAX),
    }
}

/// Stability straight from the definition: every worker and firm at least
/// as well off as alone, and no firm with a set it prefers whose members
/// all weakly prefer joining it.
pub fn stable_by_definition(m: &DiscreteMarket, assignment: &[Option<FirmId>]) -> bool {
    let r = m.roster();
    let set_of = |f: FirmId| {
        let mut s = WorkerSet::default();
        for w in r.workers() {
            if assignment[w.0] == Some(f) {
                s.insert(w);
            }
        }
        s
    };
    for w in r.workers() {
        if worker_rank(m, w, assignment[w.0]) > worker_rank(m, w, None) {
            return false;
        }
    }
    for f in r.firms() {
        let current = firm_rank(m, f, set_of(f));
        for s in r.all_workers().subsets() {
            if firm_rank(m, f, s) >= current {
                continue;
            }
            let willing = s.iter().all(|w| {
                assignment[w.0] == Some(f) || worker_rank(m, w, Some(f)) < worker_rank(m, w, assignment[w.0])
            });
            if willing {
                return false;
            }
        }
    }
    true
}

/// Every assignment of workers to firms or to nobody.
pub fn all_assignments(firms: usize, workers: usize) -> Vec<Vec<Option<FirmId>>> {
    let mut out = vec![Vec::new()];
    for _ in 0..workers {
        out = out
            .into_iter()
            .flat_map(|a: Vec<Option<FirmId>>| {
                (0..=firms).map(move |i| {
                    let mut b = a.clone();
                    b.push(if i == 0 { None } else { Some(FirmId(i - 1)) });
                    b
                })
            })
            .collect();
    }
    out
}

pub fn stable_assignments_oracle(m: &DiscreteMarket) -> Vec<Vec<Option<FirmId>>> {
    let r = m.roster();
    let mut out: Vec<_> = all_assignments(r.firm_count(), r.worker_count())
        .into_iter()
        .filter(|a| stable_by_definition(m, a))
        .collect();
    out.sort();
    out
}

/// Best total coalition value over all assignments of workers to firms.
pub fn best_partition_oracle(m: &TuMarket) -> Rational {
    let r = m.roster();
    let mut best: Option<Rational> = None;
    'outer: for a in all_assignments(r.firm_count(), r.worker_count()) {
        let mut total = int(0);
        for f in r.firms() {
            let mut s = WorkerSet::default();
            for w in r.workers() {
                if a[w.0] == Some(f) {
                    s.insert(w);
                }
            }
            if s.is_empty() {
                continue;
            }
            if !m.is_potential_coalition(f, s) {
                continue 'outer;
            }
            total += m.coalition_value(&Coalition::Firm { firm: f, workers: s }).unwrap();
        }
        if best.as_ref().is_none_or(|b| total > *b) {
            best = Some(total);
        }
    }
    best.unwrap()
}
