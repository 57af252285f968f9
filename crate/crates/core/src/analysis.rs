//! Choice-function cycle conditions, demand types and total unimodularity.
//!
//! A nontrivial odd cycle of the satisfactory-set hypergraph only threatens
//! existence when, for every firm and every pair of its cycle edges
//! `{f} ∪ S`, `{f} ∪ S′`, one of the two sets is `Ch_f(S ∪ S′)`. Such a
//! cycle yields an integer matrix with determinant `±2` whose columns lie in
//! the firms' demand type, so a totally unimodular demand type rules it
//! out.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::hypergraph::{CycleFilter, FirmWorkerHypergraph, HyperCycle, IntMatrix};
use crate::model::{AgentId, DiscreteMarket, FirmId, WorkerSet};
use crate::tu_solver::SizeGuard;

/// Verdict of [`prop1_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop1Verdict {
    Guaranteed,
    /// A nontrivial odd cycle meeting the pair condition.
    NotGuaranteed { witness: HyperCycle },
}

impl Prop1Verdict {
    pub fn is_guaranteed(&self) -> bool {
        matches!(self, Prop1Verdict::Guaranteed)
    }
}

/// Whether every pair of same-firm edges on `c` has one member chosen from
/// their union. `h` must be the satisfactory-set hypergraph of `m`.
pub fn pair_condition(m: &DiscreteMarket, h: &FirmWorkerHypergraph, c: &HyperCycle) -> bool {
    let edges: Vec<_> = c.edges.iter().map(|&i| h.edges()[i]).collect();
    edges.iter().enumerate().all(|(i, a)| {
        edges[i + 1..].iter().filter(|b| b.firm == a.firm).all(|b| {
            let ch = m.choice(a.firm, a.workers.union(b.workers));
            ch == a.workers || ch == b.workers
        })
    })
}

pub fn prop1_check(m: &DiscreteMarket, budget: u64) -> Result<Prop1Verdict> {
    let h = FirmWorkerHypergraph::from_discrete(m);
    let mut witness = None;
    h.search_cycles(CycleFilter::nontrivial_odd(h.vertex_count()), budget, |c| {
        if pair_condition(m, &h, c) {
            witness = Some(c.clone());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(match witness {
        Some(witness) => Prop1Verdict::NotGuaranteed { witness },
        None => Prop1Verdict::Guaranteed,
    })
}

/// Demand-type vectors, indexed by worker, entries in `{-1, 0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandType {
    pub workers: Vec<String>,
    /// `D_f` for each firm, in descending lexicographic order.
    pub per_firm: Vec<Vec<Vec<i64>>>,
    /// `D`, the union, in descending lexicographic order.
    pub union: Vec<Vec<i64>>,
}

impl DemandType {
    /// Vectors of `D` as the columns of a matrix with one row per worker.
    pub fn matrix(&self) -> IntMatrix {
        let cols = self.union.iter().map(|v| vector_label(v)).collect();
        IntMatrix::from_columns(self.workers.clone(), cols, &self.union).expect("uniform length")
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.union.iter().any(|d| d == v)
    }
}

/// `(1,-1)` style label.
pub fn vector_label(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

/// All nonzero `χ_{Ch_f(S)} − χ_{Ch_f(S′)}` with `S′ ⊂ S ⊆ W`.
pub fn demand_type(m: &DiscreteMarket) -> Result<DemandType> {
    demand_type_with(m, &SizeGuard::default())
}

pub fn demand_type_with(m: &DiscreteMarket, guard: &SizeGuard) -> Result<DemandType> {
    let r = m.roster();
    guard.check(r, 0)?;
    let n = r.worker_count();
    let all = r.all_workers();
    let mut per_firm = Vec::new();
    let mut union = BTreeSet::new();
    for f in r.firms() {
        let mut choice = vec![WorkerSet::EMPTY; 1usize << n];
        for s in all.subsets() {
            choice[s.bits() as usize] = m.choice(f, s);
        }
        let mut found = BTreeSet::new();
        for s in all.subsets() {
            let cs = choice[s.bits() as usize];
            for t in s.subsets() {
                let ct = choice[t.bits() as usize];
                if t != s && ct != cs {
                    let a = cs.indicator(n);
                    let b = ct.indicator(n);
                    found.insert(a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<i64>>());
                }
            }
        }
        union.extend(found.iter().cloned());
        per_firm.push(found.into_iter().rev().collect());
    }
    Ok(DemandType {
        workers: r.worker_names().to_vec(),
        per_firm,
        union: union.into_iter().rev().collect(),
    })
}

/// Verdict of [`is_totally_unimodular`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TuVerdict {
    TotallyUnimodular,
    Violation {
        rows: Vec<usize>,
        cols: Vec<usize>,
        determinant: i64,
    },
}

impl TuVerdict {
    pub fn is_totally_unimodular(&self) -> bool {
        matches!(self, TuVerdict::TotallyUnimodular)
    }
}

/// Largest dimension accepted by [`is_totally_unimodular`].
pub const MAX_TU_DIM: usize = 24;

/// Fraction-free (Bareiss) determinant of a square integer matrix.
pub fn determinant(a: &[Vec<i64>]) -> i64 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    i64::try_from(sign * m[n - 1][n - 1]).expect("determinant fits in i64")
}

/// Scans square submatrices by increasing order, then row indices, then
/// column indices (both lexicographic), and returns the first whose
/// determinant is not in `{-1, 0, 1}`.
pub fn is_totally_unimodular(a: &IntMatrix) -> Result<TuVerdict> {
    if a.nrows() > MAX_TU_DIM || a.ncols() > MAX_TU_DIM {
        return Err(Error::SizeGuard(format!(
            "{}x{} matrix (limit {MAX_TU_DIM}x{MAX_TU_DIM})",
            a.nrows(),
            a.ncols()
        )));
    }
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            if a.get(r, c).abs() > 1 {
                return Ok(TuVerdict::Violation {
                    rows: vec![r],
                    cols: vec![c],
                    determinant: a.get(r, c),
                });
            }
        }
    }
    for k in 2..=a.nrows().min(a.ncols()) {
        for rows in Combinations::new(a.nrows(), k) {
            // Zero and parallel columns give determinant 0; keep the first
            // column of each class, which preserves the scan order.
            let mut reps: Vec<usize> = Vec::new();
            let mut seen: Vec<Vec<i64>> = Vec::new();
            for c in 0..a.ncols() {
                let v: Vec<i64> = rows.iter().map(|&r| a.get(r, c)).collect();
                if v.iter().all(|&x| x == 0) {
                    continue;
                }
                let neg: Vec<i64> = v.iter().map(|x| -x).collect();
                if seen.iter().any(|s| *s == v || *s == neg) {
                    continue;
                }
                seen.push(v);
                reps.push(c);
            }
            if reps.len() < k {
                continue;
            }
            for pick in Combinations::new(reps.len(), k) {
                let cols: Vec<usize> = pick.iter().map(|&i| reps[i]).collect();
                let d = determinant(&a.submatrix(&rows, &cols));
                if d.abs() > 1 {
                    return Ok(TuVerdict::Violation {
                        rows,
                        cols,
                        determinant: d,
                    });
                }
            }
        }
    }
    Ok(TuVerdict::TotallyUnimodular)
}

/// `k`-subsets of `0..n` in lexicographic order.
pub struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            cur: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let k = out.len();
        let mut c = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                self.cur = Some(c);
                break;
            }
        }
        Some(out)
    }
}

/// Stages of the determinant certificate built from a qualifying cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCertificate {
    /// Incidence of cycle vertices (rows) and cycle edges (columns).
    pub m: IntMatrix,
    /// `m` after replacing each firm's later columns `m^j` by `m^j − m^1`.
    pub m_prime: IntMatrix,
    /// `m_prime` without the rows of firms on the cycle and their first
    /// columns; rows are the cycle's workers.
    pub m_double_prime: IntMatrix,
    /// Each column of `m_double_prime` as a full demand vector over all
    /// workers.
    pub demand_vectors: Vec<Vec<i64>>,
    pub determinant: i64,
}

/// Builds the `±2` determinant certificate for a nontrivial odd cycle of the
/// satisfactory-set hypergraph that meets the pair condition.
///
/// Each firm's cycle edges are ordered from its least to its most preferred
/// set, so every later set is the choice from its union with an earlier one.
pub fn tu_cycle_certificate(m: &DiscreteMarket, c: &HyperCycle) -> Result<CycleCertificate> {
    let h = FirmWorkerHypergraph::from_discrete(m);
    let r = m.roster();
    if c.edges.iter().any(|&e| e >= h.edges().len()) {
        return Err(Error::Precondition("cycle uses an unknown edge".into()));
    }
    if !h.is_cycle(c)? || !h.is_nontrivial_odd(c) {
        return Err(Error::Precondition("not a nontrivial odd cycle".into()));
    }
    if !pair_condition(m, &h, c) {
        return Err(Error::Precondition(
            "some firm has two cycle edges neither of which is chosen from their union".into(),
        ));
    }
    let n = r.worker_count();
    let k = c.len();
    let edges: Vec<_> = c.edges.iter().map(|&i| h.edges()[i]).collect();

    let row_labels: Vec<String> = c.vertices.iter().map(|a| r.agent_name(*a).to_string()).collect();
    let col_labels: Vec<String> = c.edges.iter().map(|&e| h.edge_label(e)).collect();
    let entries: Vec<Vec<i64>> = c
        .vertices
        .iter()
        .map(|v| edges.iter().map(|e| i64::from(e.contains(*v))).collect())
        .collect();
    let mm = IntMatrix::new(row_labels.clone(), col_labels.clone(), entries.clone())?;

    // Position of each firm's first (least preferred) cycle edge.
    let rank = |f: FirmId, s: WorkerSet| m.firm_prefs(f).iter().position(|t| *t == s);
    let mut first: Vec<Option<usize>> = vec![None; r.firm_count()];
    for (j, e) in edges.iter().enumerate() {
        let f = e.firm.0;
        let worse = match first[f] {
            None => true,
            Some(i) => rank(e.firm, e.workers) > rank(e.firm, edges[i].workers),
        };
        if worse {
            first[f] = Some(j);
        }
    }

    let mut prime = entries.clone();
    let mut labels_prime = col_labels.clone();
    let mut vectors: Vec<Vec<i64>> = edges.iter().map(|e| e.workers.indicator(n)).collect();
    for (j, e) in edges.iter().enumerate() {
        let i = first[e.firm.0].expect("firm has a cycle edge");
        if i != j {
            for row in prime.iter_mut() {
                row[j] -= row[i];
            }
            labels_prime[j] = format!("{}-{}", col_labels[j], col_labels[i]);
            let base = edges[i].workers.indicator(n);
            for (v, b) in vectors[j].iter_mut().zip(base) {
                *v -= b;
            }
        }
    }
    let m_prime = IntMatrix::new(row_labels.clone(), labels_prime.clone(), prime.clone())?;

    let keep_rows: Vec<usize> = (0..k)
        .filter(|&i| matches!(c.vertices[i], AgentId::Worker(_)))
        .collect();
    let keep_cols: Vec<usize> = (0..k)
        .filter(|&j| {
            let f = edges[j].firm;
            !(c.vertices.contains(&AgentId::Firm(f)) && first[f.0] == Some(j))
        })
        .collect();
    if keep_rows.len() != keep_cols.len() {
        return Err(Error::Internal("certificate matrix is not square".into()));
    }
    let dd = IntMatrix::new(
        keep_rows.iter().map(|&i| row_labels[i].clone()).collect(),
        keep_cols.iter().map(|&j| labels_prime[j].clone()).collect(),
        keep_rows
            .iter()
            .map(|&i| keep_cols.iter().map(|&j| prime[i][j]).collect())
            .collect(),
    )?;
    let determinant = determinant(dd.entries());
    Ok(CycleCertificate {
        m: mm,
        m_prime,
        m_double_prime: dd,
        demand_vectors: keep_cols.iter().map(|&j| vectors[j].clone()).collect(),
        determinant,
    })
}

/// Joint evaluation of demand-type unimodularity and the cycle condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop2Report {
    pub demand_type: DemandType,
    pub tu: TuVerdict,
    pub prop1: Prop1Verdict,
}

impl Prop2Report {
    /// A unimodular demand type alongside a qualifying cycle, which the
    /// theory rules out.
    pub fn falsified(&self) -> bool {
        self.tu.is_totally_unimodular() && !self.prop1.is_guaranteed()
    }
}

pub fn prop2_relation(m: &DiscreteMarket, budget: u64) -> Result<Prop2Report> {
    let demand_type = demand_type(m)?;
    let tu = is_totally_unimodular(&demand_type.matrix())?;
    let prop1 = prop1_check(m, budget)?;
    Ok(Prop2Report {
        demand_type,
        tu,
        prop1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_BUDGET;

    fn market1() -> DiscreteMarket {
        DiscreteMarket::builder()
            .firm("f1", [vec!["w1", "w2"]])
            .firm("f2", [vec!["w1"], vec!["w2"]])
            .worker("w1", ["f1", "f2"])
            .worker("w2", ["f2", "f1"])
            .build()
            .unwrap()
    }

    fn profile12() -> DiscreteMarket {
        DiscreteMarket::builder()
            .firm("f1", [vec!["w1", "w2"]])
            .firm("f2", [vec!["w1", "w2"], vec!["w1"], vec!["w2"]])
            .worker("w1", ["f1", "f2"])
            .worker("w2", ["f2", "f1"])
            .build()
            .unwrap()
    }

    fn cofactor(a: &[Vec<i64>]) -> i64 {
        if a.is_empty() {
            return 1;
        }
        (0..a.len())
            .map(|j| {
                let minor: Vec<Vec<i64>> = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a[0][j] * cofactor(&minor)
            })
            .sum()
    }

    #[test]
    fn determinants_agree_with_cofactor_expansion() {
        let cases = vec![
            vec![vec![1, 1], vec![1, -1]],
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
            vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]],
            vec![vec![2, -1, 0, 3], vec![1, 0, 0, 1], vec![0, 5, 1, 1], vec![1, 1, 1, 1]],
        ];
        for c in cases {
            assert_eq!(determinant(&c), cofactor(&c), "{c:?}");
        }
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<_> = Combinations::new(4, 2).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(Combinations::new(2, 3).count(), 0);
        assert_eq!(Combinations::new(3, 0).count(), 1);
    }

    #[test]
    fn prop1_examples() {
        assert!(prop1_check(&profile12(), DEFAULT_BUDGET).unwrap().is_guaranteed());
        let v = prop1_check(&market1(), DEFAULT_BUDGET).unwrap();
        let Prop1Verdict::NotGuaranteed { witness } = v else {
            panic!("expected witness");
        };
        assert_eq!(witness.len(), 3);
    }

    #[test]
    fn demand_types() {
        let d = demand_type(&market1()).unwrap();
        assert_eq!(d.union, vec![vec![1, 1], vec![1, 0], vec![1, -1], vec![0, 1]]);
        let d = demand_type(&profile12()).unwrap();
        assert_eq!(d.union, vec![vec![1, 1], vec![1, 0], vec![0, 1]]);
        assert_eq!(d.per_firm[1], d.union);
    }

    #[test]
    fn empty_firm_has_empty_demand_type() {
        let m = DiscreteMarket::builder()
            .firm("f", Vec::<Vec<&str>>::new())
            .worker("w", ["f"])
            .build()
            .unwrap();
        assert!(demand_type(&m).unwrap().union.is_empty());
    }

    #[test]
    fn tu_checks() {
        let ok = IntMatrix::from_columns(
            vec!["w1".into(), "w2".into()],
            vec!["a".into(), "b".into(), "c".into()],
            &[vec![1, 1], vec![1, 0], vec![0, 1]],
        )
        .unwrap();
        assert!(is_totally_unimodular(&ok).unwrap().is_totally_unimodular());
        let d = demand_type(&market1()).unwrap();
        assert_eq!(
            is_totally_unimodular(&d.matrix()).unwrap(),
            TuVerdict::Violation {
                rows: vec![0, 1],
                cols: vec![0, 2],
                determinant: -2
            }
        );
        assert!(is_totally_unimodular(&IntMatrix::identity(5)).unwrap().is_totally_unimodular());
    }

    #[test]
    fn large_entry_is_an_order_one_violation() {
        let a = IntMatrix::new(vec!["r".into()], vec!["c".into(), "d".into()], vec![vec![1, 2]]).unwrap();
        assert_eq!(
            is_totally_unimodular(&a).unwrap(),
            TuVerdict::Violation {
                rows: vec![0],
                cols: vec![1],
                determinant: 2
            }
        );
    }

    #[test]
    fn market1_certificate() {
        let m = market1();
        let Prop1Verdict::NotGuaranteed { witness } = prop1_check(&m, DEFAULT_BUDGET).unwrap() else {
            panic!();
        };
        let cert = tu_cycle_certificate(&m, &witness).unwrap();
        assert_eq!(cert.m_double_prime.row_labels(), &["w1", "w2"]);
        assert_eq!(cert.m_double_prime.entries(), &[vec![1, 1], vec![-1, 1]]);
        assert_eq!(cert.determinant.abs(), 2);
        let d = demand_type(&m).unwrap();
        assert!(cert.demand_vectors.iter().all(|v| d.contains(v)));
    }

    #[test]
    fn certificate_rejects_failing_cycle() {
        let m = profile12();
        let h = FirmWorkerHypergraph::from_discrete(&m);
        let cycles = h
            .enumerate_cycles(CycleFilter::nontrivial_odd(4), DEFAULT_BUDGET)
            .unwrap();
        assert!(!cycles.is_empty());
        assert!(matches!(
            tu_cycle_certificate(&m, &cycles[0]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn prop2_pairs() {
        let r = prop2_relation(&profile12(), DEFAULT_BUDGET).unwrap();
        assert!(r.tu.is_totally_unimodular() && r.prop1.is_guaranteed());
        let r = prop2_relation(&market1(), DEFAULT_BUDGET).unwrap();
        assert!(!r.tu.is_totally_unimodular() && !r.prop1.is_guaranteed());
        assert!(!r.falsified());
    }
}
