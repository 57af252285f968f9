//! Stability, enumeration and blocking dynamics for markets without
//! transfers.
//!
//! A matching `μ` is individually rational when every worker weakly prefers
//! `μ(w)` to being unmatched and every firm's workforce is its own choice.
//! A coalition `(f, S)` blocks `μ` when `S ≻_f μ(f)` and `f ⪰_w μ(w)` for
//! all `w ∈ S`.

use crate::error::Result;
use crate::model::{DiscreteMarket, DiscreteMatching, FirmId, WorkerId, WorkerSet};
use crate::tu_solver::SizeGuard;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockingCoalition {
    pub firm: FirmId,
    pub workers: WorkerSet,
}

impl BlockingCoalition {
    pub fn label(&self, m: &DiscreteMarket) -> String {
        let r = m.roster();
        format!("({}, {})", r.firm_name(self.firm), r.set_label(self.workers))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalityViolation {
    /// The worker prefers being unmatched to its firm.
    Worker { worker: WorkerId, firm: FirmId },
    /// `Ch_f(μ(f)) ≠ μ(f)`.
    Firm { firm: FirmId, chosen: WorkerSet },
}

impl RationalityViolation {
    pub fn describe(&self, m: &DiscreteMarket) -> String {
        let r = m.roster();
        match self {
            RationalityViolation::Worker { worker, firm } => format!(
                "{} finds {} unacceptable",
                r.worker_name(*worker),
                r.firm_name(*firm)
            ),
            RationalityViolation::Firm { firm, chosen } => format!(
                "{} would keep only {}",
                r.firm_name(*firm),
                r.set_label(*chosen)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiscreteStability {
    Stable,
    NotRational(Vec<RationalityViolation>),
    Blocked(BlockingCoalition),
}

impl DiscreteStability {
    pub fn is_stable(&self) -> bool {
        matches!(self, DiscreteStability::Stable)
    }
}

/// All individual-rationality violations, workers first.
pub fn is_individually_rational(m: &DiscreteMarket, mu: &DiscreteMatching) -> Vec<RationalityViolation> {
    let r = m.roster();
    let mut out = Vec::new();
    for w in r.workers() {
        if let Some(f) = mu.firm_of(w) {
            if !m.worker_accepts(w, f) {
                out.push(RationalityViolation::Worker { worker: w, firm: f });
            }
        }
    }
    for f in r.firms() {
        let s = mu.firm_set(f);
        let chosen = m.choice(f, s);
        if chosen != s {
            out.push(RationalityViolation::Firm { firm: f, chosen });
        }
    }
    out
}

/// The first firm (by id) with `Ch_f(T_f) ≻_f μ(f)`, where
/// `T_f = {w : f ⪰_w μ(w)}`, together with `Ch_f(T_f)`.
pub fn find_blocking_coalition(m: &DiscreteMarket, mu: &DiscreteMatching) -> Option<BlockingCoalition> {
    let r = m.roster();
    r.firms().find_map(|f| {
        let t: WorkerSet = r
            .workers()
            .filter(|&w| m.worker_weakly_prefers(w, Some(f), mu.firm_of(w)))
            .collect();
        let best = m.choice(f, t);
        m.firm_prefers(f, best, mu.firm_set(f))
            .then_some(BlockingCoalition { firm: f, workers: best })
    })
}

pub fn check_stable_discrete(m: &DiscreteMarket, mu: &DiscreteMatching) -> DiscreteStability {
    let v = is_individually_rational(m, mu);
    if !v.is_empty() {
        return DiscreteStability::NotRational(v);
    }
    match find_blocking_coalition(m, mu) {
        Some(b) => DiscreteStability::Blocked(b),
        None => DiscreteStability::Stable,
    }
}

/// Every stable matching, ordered by assignment vector (unmatched first,
/// then firm id, worker by worker).
///
/// Candidates give each firm the empty set or a satisfactory set whose
/// workers all accept it, disjoint from the other firms' sets.
pub fn enumerate_stable_matchings(m: &DiscreteMarket) -> Result<Vec<DiscreteMatching>> {
    enumerate_stable_matchings_with(m, &SizeGuard::default())
}

pub fn enumerate_stable_matchings_with(
    m: &DiscreteMarket,
    guard: &SizeGuard,
) -> Result<Vec<DiscreteMatching>> {
    let r = m.roster();
    let options: Vec<Vec<WorkerSet>> = r
        .firms()
        .map(|f| {
            m.satisfactory_sets(f)
                .into_iter()
                .filter(|s| s.iter().all(|w| m.worker_accepts(w, f)))
                .collect()
        })
        .collect();
    guard.check(r, options.iter().map(Vec::len).sum())?;

    fn recurse(
        m: &DiscreteMarket,
        options: &[Vec<WorkerSet>],
        f: usize,
        used: WorkerSet,
        mu: &mut DiscreteMatching,
        out: &mut Vec<DiscreteMatching>,
    ) {
        if f == options.len() {
            if check_stable_discrete(m, mu).is_stable() {
                out.push(mu.clone());
            }
            return;
        }
        recurse(m, options, f + 1, used, mu, out);
        for s in &options[f] {
            if s.is_disjoint(used) {
                for w in s.iter() {
                    mu.set_worker(w, Some(FirmId(f)));
                }
                recurse(m, options, f + 1, used.union(*s), mu, out);
                for w in s.iter() {
                    mu.set_worker(w, None);
                }
            }
        }
    }

    let mut out = Vec::new();
    let mut mu = DiscreteMatching::empty(r);
    recurse(m, &options, 0, WorkerSet::EMPTY, &mut mu, &mut out);
    out.sort_by(|a, b| a.assignment().cmp(b.assignment()));
    out.dedup();
    Ok(out)
}

/// One step of the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Quit { worker: WorkerId, firm: FirmId },
    Block(BlockingCoalition),
}

impl Move {
    pub fn label(&self, m: &DiscreteMarket) -> String {
        let r = m.roster();
        match self {
            Move::Quit { worker, firm } => {
                format!("{} quits {}", r.worker_name(*worker), r.firm_name(*firm))
            }
            Move::Block(b) => format!("block {}", b.label(m)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicsOutcome {
    /// `states[index]` is stable.
    StableAt(usize),
    /// `states[second]` repeats `states[first]`.
    Cycle { first: usize, second: usize },
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicsTrace {
    pub states: Vec<DiscreteMatching>,
    /// `moves[i]` turns `states[i]` into `states[i + 1]`.
    pub moves: Vec<Move>,
    pub outcome: DynamicsOutcome,
}

/// Applies `mv` to `mu`. A blocking firm's new workforce is exactly the
/// coalition: its other workers become unmatched and coalition members
/// leave their previous firms.
pub fn apply_move(mu: &DiscreteMatching, mv: Move) -> DiscreteMatching {
    let mut next = mu.clone();
    match mv {
        Move::Quit { worker, .. } => next.set_worker(worker, None),
        Move::Block(b) => {
            for w in mu.firm_set(b.firm).iter() {
                next.set_worker(w, None);
            }
            for w in b.workers.iter() {
                next.set_worker(w, Some(b.firm));
            }
        }
    }
    next
}

/// The next move from `mu`, or `None` when `mu` is stable.
///
/// The lowest-id worker at an unacceptable firm quits first; otherwise the
/// coalition from [`find_blocking_coalition`] is applied.
pub fn next_move(m: &DiscreteMarket, mu: &DiscreteMatching) -> Option<Move> {
    let r = m.roster();
    let quit = r.workers().find_map(|w| {
        mu.firm_of(w)
            .filter(|&f| !m.worker_accepts(w, f))
            .map(|f| Move::Quit { worker: w, firm: f })
    });
    quit.or_else(|| find_blocking_coalition(m, mu).map(Move::Block))
}

pub fn run_blocking_dynamics(m: &DiscreteMarket, start: &DiscreteMatching, max_steps: usize) -> DynamicsTrace {
    let mut states = vec![start.clone()];
    let mut moves = Vec::new();
    loop {
        let cur = states.last().expect("non-empty");
        let Some(mv) = next_move(m, cur) else {
            let index = states.len() - 1;
            return DynamicsTrace {
                states,
                moves,
                outcome: DynamicsOutcome::StableAt(index),
            };
        };
        if moves.len() == max_steps {
            return DynamicsTrace {
                states,
                moves,
                outcome: DynamicsOutcome::BudgetExhausted,
            };
        }
        let next = apply_move(cur, mv);
        moves.push(mv);
        let seen = states.iter().position(|s| *s == next);
        states.push(next);
        if let Some(first) = seen {
            let second = states.len() - 1;
            return DynamicsTrace {
                states,
                moves,
                outcome: DynamicsOutcome::Cycle { first, second },
            };
        }
    }
}
