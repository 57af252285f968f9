//! Stable-matching existence for transferable-utility markets.
//!
//! With `I` the singleton coalitions and `E` the firm coalitions acceptable
//! to every member, the market has a stable matching exactly when
//!
//! ```text
//!   Ṽ = min Σ_i x(i)  s.t.  Σ_{i∈S} x(i) ≥ V(S)  for all S ∈ I ∪ E
//! ```
//!
//! equals `V̄`, the best value of a partition of the agents into coalitions
//! of `I ∪ E`. The solver computes `V̄` by exhaustive search and solves the
//! dual program `max Σ δ_S V(S)  s.t.  Σ δ_S χ_S = 1, δ ≥ 0` exactly. When
//! the two values agree, prices are read off an optimal `x`, the one giving
//! firms the least in total; otherwise the fractional `δ` certifies that no
//! stable matching exists.

pub mod simplex;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{AgentId, Coalition, FirmId, Rational, Roster, TuMarket, TuMatching, WorkerSet};
use simplex::{LpFailure, StandardLp};

/// Bounds that keep exhaustive partition search and LP dimensions small.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeGuard {
    pub max_firms: usize,
    pub max_workers: usize,
    pub max_coalitions: usize,
}

impl Default for SizeGuard {
    fn default() -> Self {
        SizeGuard {
            max_firms: 8,
            max_workers: 12,
            max_coalitions: 4096,
        }
    }
}

impl SizeGuard {
    pub fn unlimited() -> Self {
        SizeGuard {
            max_firms: usize::MAX,
            max_workers: usize::MAX,
            max_coalitions: usize::MAX,
        }
    }

    pub fn check(&self, roster: &Roster, coalitions: usize) -> Result<()> {
        if roster.firm_count() > self.max_firms {
            return Err(Error::SizeGuard(format!(
                "{} firms (limit {})",
                roster.firm_count(),
                self.max_firms
            )));
        }
        if roster.worker_count() > self.max_workers {
            return Err(Error::SizeGuard(format!(
                "{} workers (limit {})",
                roster.worker_count(),
                self.max_workers
            )));
        }
        if coalitions > self.max_coalitions {
            return Err(Error::SizeGuard(format!(
                "{coalitions} coalitions (limit {})",
                self.max_coalitions
            )));
        }
        Ok(())
    }
}

/// `I ∪ E`: every singleton (agents in roster order) followed by the firm
/// coalitions acceptable to all members (firm order, then listed order).
pub fn potential_coalitions(m: &TuMarket) -> Vec<Coalition> {
    let r = m.roster();
    let mut out: Vec<Coalition> = r.agents().map(Coalition::Singleton).collect();
    for f in r.firms() {
        for (s, _) in m.acceptable_sets(f) {
            if m.is_potential_coalition(f, *s) {
                out.push(Coalition::Firm {
                    firm: f,
                    workers: *s,
                });
            }
        }
    }
    out
}

/// The coalition program of a market.
#[derive(Debug, Clone)]
pub struct TuLpProblem {
    roster: Roster,
    coalitions: Vec<Coalition>,
    values: Vec<Rational>,
}

impl TuLpProblem {
    pub fn from_market(m: &TuMarket) -> Self {
        let coalitions = potential_coalitions(m);
        let values = coalitions
            .iter()
            .map(|c| m.coalition_value(c).expect("coalitions come from I ∪ E"))
            .collect();
        TuLpProblem {
            roster: m.roster().clone(),
            coalitions,
            values,
        }
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    /// `x̂(S) = Σ_{i∈S} x(i)` for a vector indexed in roster order.
    pub fn coverage(&self, c: &Coalition, x: &[Rational]) -> Rational {
        c.members()
            .into_iter()
            .map(|a| x[self.roster.agent_index(a)].clone())
            .sum()
    }

    /// Whether `x` satisfies every constraint `x̂(S) ≥ V(S)`.
    pub fn is_primal_feasible(&self, x: &[Rational]) -> bool {
        self.coalitions
            .iter()
            .zip(&self.values)
            .all(|(c, v)| self.coverage(c, x) >= *v)
    }

    /// Whether `δ ≥ 0` covers every agent exactly once.
    pub fn is_dual_feasible(&self, d: &DualSolution) -> bool {
        let mut cover = vec![Rational::zero(); self.roster.agent_count()];
        for (c, w) in &d.weights {
            if w.is_negative() {
                return false;
            }
            for a in c.members() {
                cover[self.roster.agent_index(a)] += w;
            }
        }
        let one = Rational::from_integer(1.into());
        cover.iter().all(|v| *v == one)
    }

    /// `Σ δ_S V(S)`.
    pub fn dual_value(&self, d: &DualSolution) -> Rational {
        d.weights
            .iter()
            .map(|(c, w)| {
                let i = self
                    .coalitions
                    .iter()
                    .position(|k| k == c)
                    .expect("coalition of this problem");
                w * &self.values[i]
            })
            .sum()
    }

    /// Solves both programs exactly.
    pub fn solve(&self) -> Result<LpOutcome> {
        let n = self.roster.agent_count();
        // Dual in standard form: min Σ -V(S) δ_S  s.t.  Σ δ_S χ_S = 1.
        let mut a = vec![vec![Rational::zero(); self.coalitions.len()]; n];
        for (j, c) in self.coalitions.iter().enumerate() {
            for ag in c.members() {
                a[self.roster.agent_index(ag)][j] = Rational::from_integer(1.into());
            }
        }
        let lp = StandardLp {
            a,
            b: vec![Rational::from_integer(1.into()); n],
            c: self.values.iter().map(|v| -v.clone()).collect(),
        };
        let sol = lp.solve().map_err(|e| match e {
            LpFailure::Infeasible => Error::Internal("coalition program reported infeasible".into()),
            LpFailure::Unbounded => Error::Internal("coalition program reported unbounded".into()),
        })?;
        let value = -sol.objective.clone();
        let (primal, extra) = self.firm_minimal_primal(&value)?;
        let weights = self
            .coalitions
            .iter()
            .zip(&sol.x)
            .filter(|(_, w)| !w.is_zero())
            .map(|(c, w)| (*c, w.clone()))
            .collect();
        Ok(LpOutcome {
            primal,
            dual: DualSolution {
                weights,
                value: value.clone(),
            },
            value,
            pivots: sol.pivots + extra,
        })
    }

    /// Among optimal `x`, one minimising `Σ_f x(f)`.
    ///
    /// Solved as `min Σ_f x(f)  s.t.  x̂(S) - s_S = V(S), Σ x = Ṽ, x, s ≥ 0`
    /// (singleton constraints make `x ≥ 0` harmless).
    fn firm_minimal_primal(&self, value: &Rational) -> Result<(Vec<Rational>, usize)> {
        let n = self.roster.agent_count();
        let k = self.coalitions.len();
        let one = || Rational::from_integer(1.into());
        let mut a = vec![vec![Rational::zero(); n + k]; k + 1];
        for (j, c) in self.coalitions.iter().enumerate() {
            for ag in c.members() {
                a[j][self.roster.agent_index(ag)] = one();
            }
            a[j][n + j] = -one();
        }
        for v in a[k][..n].iter_mut() {
            *v = one();
        }
        let mut b = self.values.clone();
        b.push(value.clone());
        let mut c = vec![Rational::zero(); n + k];
        for v in c[..self.roster.firm_count()].iter_mut() {
            *v = one();
        }
        let sol = StandardLp { a, b, c }
            .solve()
            .map_err(|e| Error::Internal(format!("primal program failed at optimum: {e:?}")))?;
        Ok((sol.x[..n].to_vec(), sol.pivots))
    }
}

/// Non-zero dual weights `δ_S` and their objective `Σ δ_S V(S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSolution {
    pub weights: Vec<(Coalition, Rational)>,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    /// Optimal `x̃`, indexed in roster order (firms, then workers).
    pub primal: Vec<Rational>,
    pub dual: DualSolution,
    /// `Ṽ`, equal for both programs.
    pub value: Rational,
    pub pivots: usize,
}

/// The best partition of the agents into coalitions of `I ∪ E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub value: Rational,
    /// `μ(f)` for every firm, empty when the firm is alone.
    pub firm_sets: Vec<WorkerSet>,
}

impl Partition {
    pub fn firm_of(&self, w: crate::model::WorkerId) -> Option<FirmId> {
        self.firm_sets
            .iter()
            .position(|s| s.contains(w))
            .map(FirmId)
    }
}

/// `V̄` by exhaustive recursion over firms and their feasible sets.
///
/// Each firm tries the empty set first, then its acceptable sets in listed
/// order; the first maximiser met in that order is returned.
pub fn max_partition_value(m: &TuMarket, guard: &SizeGuard) -> Result<Partition> {
    guard.check(m.roster(), potential_coalitions(m).len())?;
    let r = m.roster();
    let options: Vec<Vec<(WorkerSet, Rational)>> = r
        .firms()
        .map(|f| {
            m.acceptable_sets(f)
                .iter()
                .filter(|(s, _)| m.is_potential_coalition(f, *s))
                .map(|(s, _)| {
                    let c = Coalition::Firm { firm: f, workers: *s };
                    (*s, m.coalition_value(&c).expect("potential coalition"))
                })
                .collect()
        })
        .collect();

    struct Best {
        value: Rational,
        sets: Vec<WorkerSet>,
    }
    fn recurse(
        options: &[Vec<(WorkerSet, Rational)>],
        f: usize,
        used: WorkerSet,
        acc: &Rational,
        cur: &mut Vec<WorkerSet>,
        best: &mut Option<Best>,
    ) {
        if f == options.len() {
            if best.as_ref().is_none_or(|b| *acc > b.value) {
                *best = Some(Best {
                    value: acc.clone(),
                    sets: cur.clone(),
                });
            }
            return;
        }
        cur.push(WorkerSet::EMPTY);
        recurse(options, f + 1, used, acc, cur, best);
        cur.pop();
        for (s, v) in &options[f] {
            if s.is_disjoint(used) {
                cur.push(*s);
                recurse(options, f + 1, used.union(*s), &(acc + v), cur, best);
                cur.pop();
            }
        }
    }

    let mut best = None;
    recurse(
        &options,
        0,
        WorkerSet::EMPTY,
        &Rational::zero(),
        &mut Vec::new(),
        &mut best,
    );
    let best = best.expect("the all-alone partition always exists");
    Ok(Partition {
        value: best.value,
        firm_sets: best.sets,
    })
}

/// Result of [`find_stable_matching_tu`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuStabilityReport {
    /// `Ṽ`.
    pub lp_value: Rational,
    /// `V̄`.
    pub partition_value: Rational,
    pub partition: Partition,
    pub lp: LpOutcome,
    pub outcome: TuOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TuOutcome {
    Stable(TuMatching),
    /// Fractional cover whose value exceeds every partition's.
    Unstable(DualSolution),
}

impl TuStabilityReport {
    pub fn is_stable(&self) -> bool {
        matches!(self.outcome, TuOutcome::Stable(_))
    }

    pub fn matching(&self) -> Option<&TuMatching> {
        match &self.outcome {
            TuOutcome::Stable(m) => Some(m),
            TuOutcome::Unstable(_) => None,
        }
    }
}

pub fn find_stable_matching_tu(m: &TuMarket) -> Result<TuStabilityReport> {
    find_stable_matching_tu_with(m, &SizeGuard::default())
}

pub fn find_stable_matching_tu_with(m: &TuMarket, guard: &SizeGuard) -> Result<TuStabilityReport> {
    let partition = max_partition_value(m, guard)?;
    let problem = TuLpProblem::from_market(m);
    let lp = problem.solve()?;
    if lp.value < partition.value {
        return Err(Error::Internal(format!(
            "LP value {} below partition value {}",
            lp.value, partition.value
        )));
    }
    let outcome = if lp.value == partition.value {
        TuOutcome::Stable(extract_matching(m, &partition, &lp.primal)?)
    } else {
        TuOutcome::Unstable(lp.dual.clone())
    };
    Ok(TuStabilityReport {
        lp_value: lp.value.clone(),
        partition_value: partition.value.clone(),
        partition,
        lp,
        outcome,
    })
}

// Every coalition of the optimal partition binds at x̃, so paying each
// matched worker x̃(w) - v_w(f) leaves every agent with utility x̃(i).
fn extract_matching(m: &TuMarket, partition: &Partition, x: &[Rational]) -> Result<TuMatching> {
    let r = m.roster();
    let mut assignment = vec![None; r.worker_count()];
    let mut prices = vec![Rational::zero(); r.worker_count()];
    for w in r.workers() {
        let xw = &x[r.agent_index(AgentId::Worker(w))];
        match partition.firm_of(w) {
            Some(f) => {
                assignment[w.0] = Some(f);
                let v = m.worker_value(w, Some(f)).expect("partition uses E");
                prices[w.0] = xw - v;
            }
            None if !xw.is_zero() => {
                return Err(Error::Internal(format!(
                    "unmatched worker {} has x̃ = {xw} at an optimum with Ṽ = V̄",
                    r.worker_name(w)
                )));
            }
            None => {}
        }
    }
    let matching = TuMatching::new(r, assignment, prices)?;
    let u = m.utilities(&matching)?;
    for f in r.firms() {
        if u.firms[f.0] != x[r.agent_index(AgentId::Firm(f))] {
            return Err(Error::Internal(format!(
                "firm {} utility {} differs from x̃",
                r.firm_name(f),
                u.firms[f.0]
            )));
        }
    }
    match check_stable_tu(m, &matching) {
        TuStability::Stable => Ok(matching),
        TuStability::Unstable(v) => Err(Error::Internal(format!(
            "extracted matching is not stable: {v:?}"
        ))),
    }
}

/// A reason a TU matching is not stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TuViolation {
    UnacceptableFirm { worker: String, firm: String },
    UnacceptableSet { firm: String, set: String },
    NegativeUtility { agent: String, utility: Rational },
    /// `V(S)` exceeds what the members currently get by `deficit`.
    Blocking { coalition: String, deficit: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TuStability {
    Stable,
    Unstable(Vec<TuViolation>),
}

impl TuStability {
    pub fn is_stable(&self) -> bool {
        matches!(self, TuStability::Stable)
    }
}

/// Individual rationality plus `U_f + Σ_{w∈S} U_w ≥ V({f} ∪ S)` for every
/// coalition of `E`; lists every violation.
pub fn check_stable_tu(m: &TuMarket, mp: &TuMatching) -> TuStability {
    let r = m.roster();
    let mut out = Vec::new();
    for w in r.workers() {
        if let Some(f) = mp.firm_of(w) {
            if !m.worker_accepts(w, f) {
                out.push(TuViolation::UnacceptableFirm {
                    worker: r.worker_name(w).into(),
                    firm: r.firm_name(f).into(),
                });
            }
        }
    }
    for f in r.firms() {
        let s = mp.firm_set(f);
        if m.firm_value(f, s).is_none() {
            out.push(TuViolation::UnacceptableSet {
                firm: r.firm_name(f).into(),
                set: r.set_label(s),
            });
        }
    }
    if !out.is_empty() {
        return TuStability::Unstable(out);
    }
    let u = m.utilities(mp).expect("pairings checked acceptable");
    for a in r.agents() {
        if u.of(a).is_negative() {
            out.push(TuViolation::NegativeUtility {
                agent: r.agent_name(a).into(),
                utility: u.of(a).clone(),
            });
        }
    }
    for c in potential_coalitions(m) {
        if let Coalition::Firm { firm, workers } = c {
            let have: Rational =
                u.firms[firm.0].clone() + workers.iter().map(|w| u.workers[w.0].clone()).sum::<Rational>();
            let v = m.coalition_value(&c).expect("potential coalition");
            if have < v {
                out.push(TuViolation::Blocking {
                    coalition: c.label(r),
                    deficit: v - have,
                });
            }
        }
    }
    if out.is_empty() {
        TuStability::Stable
    } else {
        TuStability::Unstable(out)
    }
}
