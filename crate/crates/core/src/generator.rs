//! Seeded random markets and roadmap instances.
//!
//! Randomness comes from xorshift64* seeded through splitmix64, so every
//! instance is a pure function of `(seed, params)` on every platform:
//!
//! ```text
//! splitmix64:  z = (s += 0x9E3779B97F4A7C15)
//!              z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!              z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!              seed' = z ^ (z >> 31)            (replaced by 1 if 0)
//! xorshift64*: x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27
//!              out = x * 0x2545F4914F6CDD1D     (wrapping)
//! ```
//!
//! `below(n)` rejects draws at or above the largest multiple of `n` and
//! reduces the rest mod `n`. Values are `lo + (hi - lo) * k / d` with
//! `d ∈ 1..=8` and `k ∈ 0..=d`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{
    int, DiscreteMarket, Market, RawDiscreteMarket, RawTuMarket, Rational, TuMarket, WorkerId, WorkerSet,
};
use crate::roadmap::{RawRoadmap, Roadmap};
use crate::tu_solver::SizeGuard;

/// The xorshift64* generator described in the module docs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        XorShift64Star {
            state: if z == 0 { 1 } else { z },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let r = self.next_u64();
            if r < zone {
                return r % n;
            }
        }
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    /// True with probability `p ∈ [0, 1]`, decided exactly.
    pub fn chance(&mut self, p: &Rational) -> bool {
        if p >= &Rational::one() {
            return true;
        }
        if p <= &Rational::zero() {
            return false;
        }
        let den = u64::try_from(p.denom()).expect("density denominator fits in u64");
        let num = u64::try_from(p.numer()).expect("density numerator fits in u64");
        self.below(den) < num
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.index(i + 1);
            xs.swap(i, j);
        }
    }

    /// Uniform `k`-subset of `0..n`, in increasing order.
    pub fn sample(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut all: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.index(n - i);
            all.swap(i, j);
        }
        let mut out = all[..k].to_vec();
        out.sort_unstable();
        out
    }

    /// `lo + (hi - lo) * k / d`, `d ∈ 1..=8`, `k ∈ 0..=d`.
    pub fn value(&mut self, lo: &Rational, hi: &Rational) -> Rational {
        let d = 1 + self.below(8) as i64;
        let k = self.below(d as u64 + 1) as i64;
        lo + (hi - lo) * Rational::new(k.into(), d.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub seed: u64,
    pub firm_count: usize,
    pub worker_count: usize,
    pub max_acceptable_sets_per_firm: usize,
    pub max_set_size: usize,
    pub value_range: (Rational, Rational),
    /// Probability that a worker accepts a given firm.
    pub acceptability_density: Rational,
    /// Roadmap instances only; `None` picks a size at random.
    pub technology_count: Option<usize>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            firm_count: 3,
            worker_count: 4,
            max_acceptable_sets_per_firm: 3,
            max_set_size: 2,
            value_range: (int(0), int(10)),
            acceptability_density: int(1),
            technology_count: None,
        }
    }
}

impl GenParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let guard = SizeGuard::default();
        let bad = |s: String| Err(Error::Params(s));
        if self.firm_count > guard.max_firms {
            return bad(format!("{} firms (limit {})", self.firm_count, guard.max_firms));
        }
        if self.worker_count > guard.max_workers {
            return bad(format!("{} workers (limit {})", self.worker_count, guard.max_workers));
        }
        if self.max_set_size > self.worker_count {
            return bad(format!(
                "max set size {} exceeds {} workers",
                self.max_set_size, self.worker_count
            ));
        }
        if self.max_set_size == 0 && self.max_acceptable_sets_per_firm > 0 {
            return bad("max set size must be positive".into());
        }
        if self.value_range.0 > self.value_range.1 {
            return bad("empty value range".into());
        }
        let d = &self.acceptability_density;
        if *d < Rational::zero() || *d > Rational::one() {
            return bad(format!("density {d} outside [0, 1]"));
        }
        if u64::try_from(d.denom()).is_err() {
            return bad("density denominator too large".into());
        }
        Ok(())
    }
}

fn firm_name(i: usize) -> String {
    format!("f{}", i + 1)
}

fn worker_name(i: usize) -> String {
    format!("w{}", i + 1)
}

fn names(s: &[usize]) -> Vec<String> {
    s.iter().map(|&w| worker_name(w)).collect()
}

// Distinct random sets per firm, at most `max_acceptable_sets_per_firm`.
fn random_sets(rng: &mut XorShift64Star, p: &GenParams) -> Vec<Vec<usize>> {
    let count = rng.index(p.max_acceptable_sets_per_firm + 1);
    let mut out: Vec<Vec<usize>> = Vec::new();
    for _ in 0..count {
        let size = 1 + rng.index(p.max_set_size);
        let s = rng.sample(p.worker_count, size);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

pub fn gen_tu_market(p: &GenParams) -> Result<TuMarket> {
    p.validate()?;
    let mut rng = XorShift64Star::new(p.seed);
    let (lo, hi) = &p.value_range;
    let mut raw = RawTuMarket::default();
    for f in 0..p.firm_count {
        let sets = random_sets(&mut rng, p)
            .into_iter()
            .map(|s| (names(&s), rng.value(lo, hi)))
            .collect();
        raw.firms.push((firm_name(f), sets));
    }
    for w in 0..p.worker_count {
        let mut accepted = Vec::new();
        for f in 0..p.firm_count {
            if rng.chance(&p.acceptability_density) {
                accepted.push((firm_name(f), rng.value(lo, hi)));
            }
        }
        raw.workers.push((worker_name(w), accepted));
    }
    TuMarket::from_raw(raw)
}

pub fn gen_discrete_market(p: &GenParams) -> Result<DiscreteMarket> {
    p.validate()?;
    let mut rng = XorShift64Star::new(p.seed);
    let mut raw = RawDiscreteMarket::default();
    for f in 0..p.firm_count {
        let mut sets = random_sets(&mut rng, p);
        rng.shuffle(&mut sets);
        raw.firms.push((firm_name(f), sets.iter().map(|s| names(s)).collect()));
    }
    for w in 0..p.worker_count {
        let mut accepted: Vec<usize> = (0..p.firm_count)
            .filter(|_| rng.chance(&p.acceptability_density))
            .collect();
        rng.shuffle(&mut accepted);
        raw.workers
            .push((worker_name(w), accepted.into_iter().map(firm_name).collect()));
    }
    DiscreteMarket::from_raw(raw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Tu,
    Discrete,
}

/// Attempts before [`gen_roadmap_instance`] gives up.
pub const ROADMAP_RETRIES: usize = 200;

/// A random roadmap with specialist workers and a market whose firms are
/// specialized in it.
///
/// The roadmap is a random directed tree. A path cover of the tree is
/// handed to distinct workers (so every technology demands someone) and the
/// remaining workers engage in random paths. Firms receive vertex-disjoint
/// random paths and draw their acceptable sets from the `W^v` on their own
/// path. `max_set_size` does not apply here.
pub fn gen_roadmap_instance(p: &GenParams, kind: InstanceKind) -> Result<(RawRoadmap, Market)> {
    p.validate()?;
    if p.worker_count == 0 {
        return Err(Error::Params("roadmap instances need at least one worker".into()));
    }
    let mut rng = XorShift64Star::new(p.seed);
    for _ in 0..ROADMAP_RETRIES {
        if let Some(out) = try_roadmap(&mut rng, p, kind)? {
            return Ok(out);
        }
    }
    Err(Error::Params(format!(
        "no roadmap instance after {ROADMAP_RETRIES} attempts; try more workers or fewer firms"
    )))
}

fn try_roadmap(
    rng: &mut XorShift64Star,
    p: &GenParams,
    kind: InstanceKind,
) -> Result<Option<(RawRoadmap, Market)>> {
    let nv = match p.technology_count {
        Some(n) => n.max(1),
        None => p.firm_count.max(1) + rng.index(p.worker_count + 1),
    };
    let mut edges = Vec::new();
    for i in 1..nv {
        let parent = rng.index(i);
        edges.push(if rng.below(2) == 0 { (parent, i) } else { (i, parent) });
    }
    let out_edges = |v: usize| edges.iter().filter(move |e| e.0 == v).map(|e| e.1);

    // Path cover: grow forward from each uncovered vertex.
    let mut covered = vec![false; nv];
    let mut cover: Vec<Vec<usize>> = Vec::new();
    for v in 0..nv {
        if covered[v] {
            continue;
        }
        let mut path = vec![v];
        covered[v] = true;
        let mut cur = v;
        while let Some(next) = out_edges(cur).find(|&u| !covered[u]) {
            covered[next] = true;
            path.push(next);
            cur = next;
        }
        cover.push(path);
    }
    if cover.len() > p.worker_count {
        return Ok(None);
    }

    let mut all_paths: Vec<Vec<usize>> = (0..nv).map(|v| vec![v]).collect();
    let mut stack = all_paths.clone();
    while let Some(path) = stack.pop() {
        for u in out_edges(*path.last().expect("non-empty")) {
            let mut q = path.clone();
            q.push(u);
            all_paths.push(q.clone());
            stack.push(q);
        }
    }
    all_paths.sort();

    let mut workers: Vec<usize> = (0..p.worker_count).collect();
    rng.shuffle(&mut workers);
    let mut demanded = vec![WorkerSet::EMPTY; nv];
    for (i, &w) in workers.iter().enumerate() {
        let path = match cover.get(i) {
            Some(c) => c.clone(),
            None => all_paths[rng.index(all_paths.len())].clone(),
        };
        for v in path {
            demanded[v].insert(WorkerId(w));
        }
    }

    let mut firm_paths: Vec<Vec<usize>> = Vec::new();
    let mut used = vec![false; nv];
    for _ in 0..p.firm_count {
        let free: Vec<&Vec<usize>> = all_paths
            .iter()
            .filter(|q| q.iter().all(|&v| !used[v]))
            .collect();
        if free.is_empty() {
            return Ok(None);
        }
        let q = free[rng.index(free.len())].clone();
        for &v in &q {
            used[v] = true;
        }
        firm_paths.push(q);
    }

    let raw_roadmap = RawRoadmap {
        technologies: (0..nv)
            .map(|v| {
                let ws: Vec<usize> = demanded[v].iter().map(|w| w.0).collect();
                (format!("v{}", v + 1), names(&ws))
            })
            .collect(),
        edges: edges
            .iter()
            .map(|&(a, b)| (format!("v{}", a + 1), format!("v{}", b + 1)))
            .collect(),
    };

    let (lo, hi) = &p.value_range;
    let firm_sets: Vec<Vec<Vec<String>>> = firm_paths
        .iter()
        .map(|q| {
            let mut options: Vec<WorkerSet> = Vec::new();
            for &v in q {
                if !options.contains(&demanded[v]) {
                    options.push(demanded[v]);
                }
            }
            let cap = p.max_acceptable_sets_per_firm.min(options.len());
            let k = if cap == 0 { 0 } else { 1 + rng.index(cap) };
            let mut picked: Vec<WorkerSet> = rng.sample(options.len(), k).into_iter().map(|i| options[i]).collect();
            rng.shuffle(&mut picked);
            picked
                .iter()
                .map(|s| names(&s.iter().map(|w| w.0).collect::<Vec<_>>()))
                .collect()
        })
        .collect();

    let market = match kind {
        InstanceKind::Tu => {
            let mut raw = RawTuMarket::default();
            for (f, sets) in firm_sets.into_iter().enumerate() {
                let valued = sets.into_iter().map(|s| (s, rng.value(lo, hi))).collect();
                raw.firms.push((firm_name(f), valued));
            }
            for w in 0..p.worker_count {
                let accepted = (0..p.firm_count)
                    .filter_map(|f| {
                        rng.chance(&p.acceptability_density)
                            .then(|| (firm_name(f), rng.value(lo, hi)))
                    })
                    .collect();
                raw.workers.push((worker_name(w), accepted));
            }
            Market::Tu(TuMarket::from_raw(raw)?)
        }
        InstanceKind::Discrete => {
            let mut raw = RawDiscreteMarket::default();
            for (f, sets) in firm_sets.into_iter().enumerate() {
                raw.firms.push((firm_name(f), sets));
            }
            for w in 0..p.worker_count {
                let mut accepted: Vec<usize> = (0..p.firm_count)
                    .filter(|_| rng.chance(&p.acceptability_density))
                    .collect();
                rng.shuffle(&mut accepted);
                raw.workers
                    .push((worker_name(w), accepted.into_iter().map(firm_name).collect()));
            }
            Market::Discrete(DiscreteMarket::from_raw(raw)?)
        }
    };
    // The construction guarantees a valid tree; validation here is a
    // cross-check rather than a filter.
    Roadmap::new(&raw_roadmap, market.roster())?;
    Ok(Some((raw_roadmap, market)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_market;
    use crate::roadmap::{check_specialized, theorem3_report};
    use crate::DEFAULT_BUDGET;

    #[test]
    fn reference_stream() {
        // Fixed outputs pin the algorithm across platforms and refactors.
        let mut a = XorShift64Star::new(1);
        let first: Vec<u64> = (0..3).map(|_| a.next_u64()).collect();
        let mut b = XorShift64Star::new(1);
        assert_eq!(first, (0..3).map(|_| b.next_u64()).collect::<Vec<_>>());
        let mut z = XorShift64Star { state: 1 };
        // x = 1: 1 ^ (1 << 25) = 0x2000001, then ^ (0x2000001 >> 27) = 0x2000001.
        assert_eq!(z.next_u64(), 0x2000001u64.wrapping_mul(0x2545_F491_4F6C_DD1D));
    }

    #[test]
    fn below_stays_in_range() {
        let mut r = XorShift64Star::new(9);
        for n in 1..50 {
            for _ in 0..20 {
                assert!(r.below(n) < n);
            }
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let p = GenParams::default().with_seed(1);
        assert_eq!(gen_tu_market(&p).unwrap(), gen_tu_market(&p).unwrap());
        assert_eq!(gen_discrete_market(&p).unwrap(), gen_discrete_market(&p).unwrap());
        let q = GenParams::default().with_seed(2);
        assert_ne!(gen_tu_market(&p).unwrap(), gen_tu_market(&q).unwrap());
    }

    #[test]
    fn zero_density_means_no_acceptance() {
        let p = GenParams {
            acceptability_density: int(0),
            ..GenParams::default()
        };
        let m = gen_tu_market(&p).unwrap();
        assert_eq!(crate::tu_solver::potential_coalitions(&m).len(), 7);
    }

    #[test]
    fn marriage_mode_has_singletons() {
        let p = GenParams {
            max_set_size: 1,
            ..GenParams::default()
        };
        for seed in 0..50 {
            let m = gen_discrete_market(&p.clone().with_seed(seed)).unwrap();
            assert!(m.roster().firms().all(|f| m.firm_prefs(f).iter().all(|s| s.len() == 1)));
        }
    }

    #[test]
    fn generated_markets_validate() {
        for seed in 0..200 {
            let p = GenParams::default().with_seed(seed);
            let d = gen_discrete_market(&p).unwrap();
            assert!(validate_market(&crate::model::RawMarket::Discrete(d.to_raw())).is_ok());
            let t = gen_tu_market(&p).unwrap();
            assert!(validate_market(&crate::model::RawMarket::Tu(t.to_raw())).is_ok());
        }
    }

    #[test]
    fn bad_params() {
        let p = GenParams {
            worker_count: 50,
            ..GenParams::default()
        };
        assert!(matches!(gen_tu_market(&p), Err(Error::Params(_))));
        let p = GenParams {
            max_set_size: 9,
            ..GenParams::default()
        };
        assert!(matches!(gen_discrete_market(&p), Err(Error::Params(_))));
        let p = GenParams {
            acceptability_density: int(2),
            ..GenParams::default()
        };
        assert!(gen_tu_market(&p).is_err());
    }

    #[test]
    fn roadmap_instances_meet_hypotheses() {
        for seed in 0..100 {
            for kind in [InstanceKind::Tu, InstanceKind::Discrete] {
                let p = GenParams::default().with_seed(seed);
                let (raw, m) = gen_roadmap_instance(&p, kind).unwrap();
                let r = Roadmap::new(&raw, m.roster()).unwrap();
                assert!(check_specialized(&m, &r).is_specialized(), "seed {seed}");
                let rep = theorem3_report(&m, &r, DEFAULT_BUDGET).unwrap();
                assert!(rep.holds(), "seed {seed}: {rep:?}");
            }
        }
    }
}
