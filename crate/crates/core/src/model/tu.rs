use num_traits::Zero;

use super::{
    check_names, resolve_set, AgentId, FirmId, IntoValue, Rational, Roster, Violation, WorkerId,
    WorkerSet,
};
use crate::error::{Error, Result};

/// Name-based transferable-utility market as entered by a user.
///
/// `firms[i].1` lists the acceptable sets of firm `i` with their values;
/// `workers[j].1` lists the firms worker `j` accepts with the worker's value
/// for each. Everything not listed is unacceptable.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawTuMarket {
    pub firms: Vec<(String, Vec<(Vec<String>, Rational)>)>,
    pub workers: Vec<(String, Vec<(String, Rational)>)>,
}

/// A validated market with transferable utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct TuMarket {
    roster: Roster,
    firm_sets: Vec<Vec<(WorkerSet, Rational)>>,
    // [worker][firm], `None` when the firm is unacceptable to the worker.
    worker_values: Vec<Vec<Option<Rational>>>,
}

impl TuMarket {
    pub fn builder() -> TuMarketBuilder {
        TuMarketBuilder::default()
    }

    pub fn from_raw(raw: RawTuMarket) -> Result<Self> {
        Self::check(&raw).map_err(Error::Invalid)
    }

    /// Validates `raw`, collecting every violation rather than stopping at
    /// the first.
    pub fn check(raw: &RawTuMarket) -> std::result::Result<Self, Vec<Violation>> {
        let mut out = Vec::new();
        let firm_names: Vec<&String> = raw.firms.iter().map(|(n, _)| n).collect();
        let worker_names: Vec<&String> = raw.workers.iter().map(|(n, _)| n).collect();
        let roster = check_names(&firm_names, &worker_names, &mut out);

        let mut firm_sets = Vec::with_capacity(raw.firms.len());
        for (name, sets) in &raw.firms {
            let mut resolved: Vec<(WorkerSet, Rational)> = Vec::new();
            for (names, value) in sets {
                if let Some(s) = resolve_set(&roster, name, names, &mut out) {
                    if resolved.iter().any(|(t, _)| *t == s) {
                        out.push(Violation::DuplicateSet {
                            firm: name.clone(),
                            set: roster.set_names(s),
                        });
                    } else {
                        resolved.push((s, value.clone()));
                    }
                }
            }
            firm_sets.push(resolved);
        }

        let mut worker_values = Vec::with_capacity(raw.workers.len());
        for (name, values) in &raw.workers {
            let mut row = vec![None; raw.firms.len()];
            for (firm, value) in values {
                match roster.firm(firm) {
                    Ok(f) if row[f.0].is_some() => out.push(Violation::DuplicateFirmInPrefs {
                        worker: name.clone(),
                        firm: firm.clone(),
                    }),
                    Ok(f) => row[f.0] = Some(value.clone()),
                    Err(_) => out.push(Violation::UnknownFirm {
                        worker: name.clone(),
                        firm: firm.clone(),
                    }),
                }
            }
            worker_values.push(row);
        }

        if out.is_empty() {
            Ok(TuMarket {
                roster,
                firm_sets,
                worker_values,
            })
        } else {
            Err(out)
        }
    }

    pub fn to_raw(&self) -> RawTuMarket {
        let r = &self.roster;
        RawTuMarket {
            firms: r
                .firms()
                .map(|f| {
                    let sets = self.firm_sets[f.0]
                        .iter()
                        .map(|(s, v)| (r.set_names(*s), v.clone()))
                        .collect();
                    (r.firm_name(f).to_string(), sets)
                })
                .collect(),
            workers: r
                .workers()
                .map(|w| {
                    let vals = r
                        .firms()
                        .filter_map(|f| {
                            self.worker_values[w.0][f.0]
                                .clone()
                                .map(|v| (r.firm_name(f).to_string(), v))
                        })
                        .collect();
                    (r.worker_name(w).to_string(), vals)
                })
                .collect(),
        }
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    /// Acceptable sets of `f` with their values, in listed order.
    pub fn acceptable_sets(&self, f: FirmId) -> &[(WorkerSet, Rational)] {
        &self.firm_sets[f.0]
    }

    /// `v_f(S)`; zero for the empty set, `None` for an unacceptable set.
    pub fn firm_value(&self, f: FirmId, s: WorkerSet) -> Option<Rational> {
        if s.is_empty() {
            return Some(Rational::zero());
        }
        self.firm_sets[f.0]
            .iter()
            .find(|(t, _)| *t == s)
            .map(|(_, v)| v.clone())
    }

    /// `v_w(f)`; zero for being unmatched, `None` for an unacceptable firm.
    pub fn worker_value(&self, w: WorkerId, f: Option<FirmId>) -> Option<Rational> {
        match f {
            None => Some(Rational::zero()),
            Some(f) => self.worker_values[w.0][f.0].clone(),
        }
    }

    pub fn worker_accepts(&self, w: WorkerId, f: FirmId) -> bool {
        self.worker_values[w.0][f.0].is_some()
    }

    /// Whether `{f} ∪ S` passes both firm and worker acceptability.
    pub fn is_potential_coalition(&self, f: FirmId, s: WorkerSet) -> bool {
        !s.is_empty()
            && self.firm_value(f, s).is_some()
            && s.iter().all(|w| self.worker_accepts(w, f))
    }

    /// Aggregate value of a coalition: `v_f(S) + Σ_{w∈S} v_w(f)` for a firm
    /// coalition, zero for a singleton.
    pub fn coalition_value(&self, c: &Coalition) -> Result<Rational> {
        match c {
            Coalition::Singleton(_) => Ok(Rational::zero()),
            Coalition::Firm { firm, workers } => {
                if !self.is_potential_coalition(*firm, *workers) {
                    return Err(Error::Precondition(format!(
                        "{} is not a potential blocking coalition",
                        c.label(&self.roster)
                    )));
                }
                let mut v = self.firm_value(*firm, *workers).expect("checked");
                for w in workers.iter() {
                    v += self.worker_values[w.0][firm.0].as_ref().expect("checked");
                }
                Ok(v)
            }
        }
    }

    /// Per-agent utilities under `(μ, p)`.
    ///
    /// Fails when some firm holds an unacceptable set or some worker sits at
    /// an unacceptable firm, since the utility is undefined there.
    pub fn utilities(&self, m: &TuMatching) -> Result<Utilities> {
        let r = &self.roster;
        let mut workers = Vec::with_capacity(r.worker_count());
        for w in r.workers() {
            let firm = m.assignment[w.0];
            let v = self.worker_value(w, firm).ok_or_else(|| {
                Error::Precondition(format!(
                    "worker {} is matched to unacceptable firm {}",
                    r.worker_name(w),
                    r.firm_name(firm.expect("ø is always acceptable"))
                ))
            })?;
            workers.push(v + &m.prices[w.0]);
        }
        let mut firms = Vec::with_capacity(r.firm_count());
        for f in r.firms() {
            let s = m.firm_set(f);
            let v = self.firm_value(f, s).ok_or_else(|| {
                Error::Precondition(format!(
                    "firm {} holds unacceptable set {}",
                    r.firm_name(f),
                    r.set_label(s)
                ))
            })?;
            let paid: Rational = s.iter().map(|w| m.prices[w.0].clone()).sum();
            firms.push(v - paid);
        }
        Ok(Utilities { firms, workers })
    }
}

/// Fluent construction of a [`TuMarket`] from names.
#[derive(Debug, Clone, Default)]
pub struct TuMarketBuilder {
    raw: RawTuMarket,
}

impl TuMarketBuilder {
    /// Adds a firm with its acceptable sets and values.
    pub fn firm<S, N, V>(mut self, name: &str, sets: impl IntoIterator<Item = (S, V)>) -> Self
    where
        S: IntoIterator<Item = N>,
        N: AsRef<str>,
        V: IntoValue,
    {
        let sets = sets
            .into_iter()
            .map(|(s, v)| {
                let names = s.into_iter().map(|n| n.as_ref().to_string()).collect();
                (names, v.into_value())
            })
            .collect();
        self.raw.firms.push((name.to_string(), sets));
        self
    }

    /// Adds a worker with its values for each acceptable firm.
    pub fn worker<V: IntoValue>(
        mut self,
        name: &str,
        values: impl IntoIterator<Item = (&'static str, V)>,
    ) -> Self {
        let values = values
            .into_iter()
            .map(|(f, v)| (f.to_string(), v.into_value()))
            .collect();
        self.raw.workers.push((name.to_string(), values));
        self
    }

    /// Adds a worker who accepts every firm declared so far and cares only
    /// about wages (`v_w ≡ 0`).
    pub fn wage_worker(mut self, name: &str) -> Self {
        let values = self
            .raw
            .firms
            .iter()
            .map(|(f, _)| (f.clone(), Rational::zero()))
            .collect();
        self.raw.workers.push((name.to_string(), values));
        self
    }

    pub fn raw(&self) -> &RawTuMarket {
        &self.raw
    }

    pub fn build(self) -> Result<TuMarket> {
        TuMarket::from_raw(self.raw)
    }
}

/// A coalition from `I ∪ E`: a single agent, or a firm with a non-empty
/// worker set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coalition {
    Singleton(AgentId),
    Firm { firm: FirmId, workers: WorkerSet },
}

impl Coalition {
    pub fn firm(firm: FirmId, workers: WorkerSet) -> Result<Self> {
        if workers.is_empty() {
            return Err(Error::Precondition(
                "a firm coalition needs at least one worker".into(),
            ));
        }
        Ok(Coalition::Firm { firm, workers })
    }

    pub fn contains(&self, a: AgentId) -> bool {
        match (*self, a) {
            (Coalition::Singleton(b), a) => a == b,
            (Coalition::Firm { firm, .. }, AgentId::Firm(f)) => f == firm,
            (Coalition::Firm { workers, .. }, AgentId::Worker(w)) => workers.contains(w),
        }
    }

    pub fn members(&self) -> Vec<AgentId> {
        match *self {
            Coalition::Singleton(a) => vec![a],
            Coalition::Firm { firm, workers } => std::iter::once(AgentId::Firm(firm))
                .chain(workers.iter().map(AgentId::Worker))
                .collect(),
        }
    }

    pub fn label(&self, roster: &Roster) -> String {
        let names: Vec<String> = self
            .members()
            .into_iter()
            .map(|a| roster.agent_name(a).to_string())
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

/// Assignment of workers to firms together with a wage for every worker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuMatching {
    assignment: Vec<Option<FirmId>>,
    prices: Vec<Rational>,
}

impl TuMatching {
    /// Fails if the vectors do not match the market or an unmatched worker
    /// has a non-zero price.
    pub fn new(
        roster: &Roster,
        assignment: Vec<Option<FirmId>>,
        prices: Vec<Rational>,
    ) -> Result<Self> {
        let n = roster.worker_count();
        if assignment.len() != n || prices.len() != n {
            return Err(Error::Precondition(format!(
                "matching covers {} workers, market has {n}",
                assignment.len()
            )));
        }
        for (w, (a, p)) in assignment.iter().zip(&prices).enumerate() {
            if let Some(f) = a {
                if f.0 >= roster.firm_count() {
                    return Err(Error::UnknownFirm(format!("#{}", f.0)));
                }
            } else if !p.is_zero() {
                return Err(Error::Precondition(format!(
                    "unmatched worker {} has non-zero price {p}",
                    roster.worker_name(WorkerId(w))
                )));
            }
        }
        Ok(TuMatching { assignment, prices })
    }

    pub fn unmatched(roster: &Roster) -> Self {
        TuMatching {
            assignment: vec![None; roster.worker_count()],
            prices: vec![Rational::zero(); roster.worker_count()],
        }
    }

    pub fn assignment(&self) -> &[Option<FirmId>] {
        &self.assignment
    }

    pub fn prices(&self) -> &[Rational] {
        &self.prices
    }

    pub fn firm_of(&self, w: WorkerId) -> Option<FirmId> {
        self.assignment[w.0]
    }

    pub fn price(&self, w: WorkerId) -> &Rational {
        &self.prices[w.0]
    }

    /// `μ(f) = {w : μ(w) = f}`.
    pub fn firm_set(&self, f: FirmId) -> WorkerSet {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == Some(f))
            .map(|(w, _)| WorkerId(w))
            .collect()
    }
}

/// Utility of every agent under a matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utilities {
    pub firms: Vec<Rational>,
    pub workers: Vec<Rational>,
}

impl Utilities {
    pub fn of(&self, a: AgentId) -> &Rational {
        match a {
            AgentId::Firm(f) => &self.firms[f.0],
            AgentId::Worker(w) => &self.workers[w.0],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::int;

    fn intro() -> TuMarket {
        TuMarket::builder()
            .firm("f1", [(vec!["w1", "w2"], 6)])
            .firm("f2", [(vec!["w1"], 4), (vec!["w2"], 4)])
            .wage_worker("w1")
            .wage_worker("w2")
            .build()
            .unwrap()
    }

    #[test]
    fn coalition_values_of_intro_market() {
        let m = intro();
        let r = m.roster();
        let both = r.workers_from_names(&["w1", "w2"]).unwrap();
        let c = Coalition::firm(FirmId(0), both).unwrap();
        assert_eq!(m.coalition_value(&c).unwrap(), int(6));
        for a in r.agents() {
            assert_eq!(m.coalition_value(&Coalition::Singleton(a)).unwrap(), int(0));
        }
        let bad = Coalition::firm(FirmId(1), both).unwrap();
        assert!(matches!(m.coalition_value(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn utilities_substitute_into_quasilinear_form() {
        let m = intro();
        let mu = TuMatching::new(
            m.roster(),
            vec![Some(FirmId(0)), Some(FirmId(0))],
            vec![int(3), int(3)],
        )
        .unwrap();
        let u = m.utilities(&mu).unwrap();
        assert_eq!(u.firms, vec![int(0), int(0)]);
        assert_eq!(u.workers, vec![int(3), int(3)]);

        let none = TuMatching::unmatched(m.roster());
        let u = m.utilities(&none).unwrap();
        assert!(u.firms.iter().chain(&u.workers).all(|x| x.is_zero()));
    }

    #[test]
    fn utilities_reject_unacceptable_pairings() {
        let m = intro();
        // f2 holding both workers is not an acceptable set.
        let mu = TuMatching::new(
            m.roster(),
            vec![Some(FirmId(1)), Some(FirmId(1))],
            vec![int(1), int(1)],
        )
        .unwrap();
        assert!(m.utilities(&mu).is_err());
    }

    #[test]
    fn unmatched_worker_must_have_zero_price() {
        let m = intro();
        let err = TuMatching::new(m.roster(), vec![None, None], vec![int(1), int(0)]);
        assert!(err.is_err());
    }

    #[test]
    fn validation_collects_every_violation() {
        let raw = TuMarket::builder()
            .firm("f1", [(vec!["w1", "w9"], 1), (vec![], 2)])
            .firm("f1", [(vec!["w1"], 1), (vec!["w1"], 3)])
            .worker("w1", [("f7", 0)])
            .raw()
            .clone();
        let vs = TuMarket::check(&raw).unwrap_err();
        assert!(vs.contains(&Violation::DuplicateFirm("f1".into())));
        assert!(vs.iter().any(|v| matches!(v, Violation::UnknownWorker { worker, .. } if worker == "w9")));
        assert!(vs.iter().any(|v| matches!(v, Violation::EmptyAcceptableSet { .. })));
        assert!(vs.iter().any(|v| matches!(v, Violation::DuplicateSet { .. })));
        assert!(vs.iter().any(|v| matches!(v, Violation::UnknownFirm { firm, .. } if firm == "f7")));
    }

    #[test]
    fn empty_market_is_valid() {
        assert!(TuMarket::from_raw(RawTuMarket::default()).is_ok());
    }

    #[test]
    fn raw_round_trip() {
        let m = intro();
        assert_eq!(TuMarket::from_raw(m.to_raw()).unwrap(), m);
    }
}
