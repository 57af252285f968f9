use super::{check_names, resolve_set, FirmId, Roster, Violation, WorkerId, WorkerSet};
use crate::error::{Error, Result};

/// Name-based discrete market.
///
/// `firms[i].1` ranks the acceptable sets of firm `i`, best first; every
/// set not listed is worse than hiring nobody. `workers[j].1` ranks the
/// acceptable firms of worker `j`, best first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawDiscreteMarket {
    pub firms: Vec<(String, Vec<Vec<String>>)>,
    pub workers: Vec<(String, Vec<String>)>,
}

/// A validated discrete (no transfers) many-to-one market.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMarket {
    roster: Roster,
    firm_prefs: Vec<Vec<WorkerSet>>,
    worker_prefs: Vec<Vec<FirmId>>,
    // [worker][firm] position in the worker's list.
    worker_rank: Vec<Vec<Option<usize>>>,
}

impl DiscreteMarket {
    pub fn builder() -> DiscreteMarketBuilder {
        DiscreteMarketBuilder::default()
    }

    pub fn from_raw(raw: RawDiscreteMarket) -> Result<Self> {
        Self::check(&raw).map_err(Error::Invalid)
    }

    pub fn check(raw: &RawDiscreteMarket) -> std::result::Result<Self, Vec<Violation>> {
        let mut out = Vec::new();
        let firm_names: Vec<&String> = raw.firms.iter().map(|(n, _)| n).collect();
        let worker_names: Vec<&String> = raw.workers.iter().map(|(n, _)| n).collect();
        let roster = check_names(&firm_names, &worker_names, &mut out);

        let mut firm_prefs = Vec::with_capacity(raw.firms.len());
        for (name, list) in &raw.firms {
            let mut prefs: Vec<WorkerSet> = Vec::new();
            for names in list {
                if let Some(s) = resolve_set(&roster, name, names, &mut out) {
                    if prefs.contains(&s) {
                        out.push(Violation::DuplicateSet {
                            firm: name.clone(),
                            set: roster.set_names(s),
                        });
                    } else {
                        prefs.push(s);
                    }
                }
            }
            firm_prefs.push(prefs);
        }

        let mut worker_prefs = Vec::with_capacity(raw.workers.len());
        let mut worker_rank = Vec::with_capacity(raw.workers.len());
        for (name, list) in &raw.workers {
            let mut prefs = Vec::new();
            let mut rank = vec![None; raw.firms.len()];
            for firm in list {
                match roster.firm(firm) {
                    Ok(f) if rank[f.0].is_some() => out.push(Violation::DuplicateFirmInPrefs {
                        worker: name.clone(),
                        firm: firm.clone(),
                    }),
                    Ok(f) => {
                        rank[f.0] = Some(prefs.len());
                        prefs.push(f);
                    }
                    Err(_) => out.push(Violation::UnknownFirm {
                        worker: name.clone(),
                        firm: firm.clone(),
                    }),
                }
            }
            worker_prefs.push(prefs);
            worker_rank.push(rank);
        }

        if out.is_empty() {
            Ok(DiscreteMarket {
                roster,
                firm_prefs,
                worker_prefs,
                worker_rank,
            })
        } else {
            Err(out)
        }
    }

    pub fn to_raw(&self) -> RawDiscreteMarket {
        let r = &self.roster;
        RawDiscreteMarket {
            firms: r
                .firms()
                .map(|f| {
                    let sets = self.firm_prefs[f.0].iter().map(|s| r.set_names(*s)).collect();
                    (r.firm_name(f).to_string(), sets)
                })
                .collect(),
            workers: r
                .workers()
                .map(|w| {
                    let firms = self.worker_prefs[w.0]
                        .iter()
                        .map(|f| r.firm_name(*f).to_string())
                        .collect();
                    (r.worker_name(w).to_string(), firms)
                })
                .collect(),
        }
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    /// Acceptable sets of `f`, best first.
    pub fn firm_prefs(&self, f: FirmId) -> &[WorkerSet] {
        &self.firm_prefs[f.0]
    }

    /// Acceptable firms of `w`, best first.
    pub fn worker_prefs(&self, w: WorkerId) -> &[FirmId] {
        &self.worker_prefs[w.0]
    }

    pub fn worker_accepts(&self, w: WorkerId, f: FirmId) -> bool {
        self.worker_rank[w.0][f.0].is_some()
    }

    /// `Ch_f(S)`: the best listed subset of `S`, or the empty set.
    pub fn choice(&self, f: FirmId, s: WorkerSet) -> WorkerSet {
        self.firm_prefs[f.0]
            .iter()
            .copied()
            .find(|t| t.is_subset(s))
            .unwrap_or(WorkerSet::EMPTY)
    }

    /// Name-based [`choice`](Self::choice).
    pub fn choice_by_name(&self, firm: &str, workers: &[&str]) -> Result<WorkerSet> {
        let f = self.roster.firm(firm)?;
        let s = self.roster.workers_from_names(workers)?;
        Ok(self.choice(f, s))
    }

    /// Acceptable sets that are their own choice, in preference order.
    pub fn satisfactory_sets(&self, f: FirmId) -> Vec<WorkerSet> {
        self.firm_prefs[f.0]
            .iter()
            .copied()
            .filter(|s| self.choice(f, *s) == *s)
            .collect()
    }

    // Listed sets rank by position, ∅ right after them, everything else
    // after ∅ (mutually incomparable).
    fn set_rank(&self, f: FirmId, s: WorkerSet) -> usize {
        let prefs = &self.firm_prefs[f.0];
        if s.is_empty() {
            return prefs.len();
        }
        prefs
            .iter()
            .position(|t| *t == s)
            .unwrap_or(prefs.len() + 1)
    }

    /// `S ≻_f T`.
    pub fn firm_prefers(&self, f: FirmId, s: WorkerSet, t: WorkerSet) -> bool {
        s != t && self.set_rank(f, s) < self.set_rank(f, t)
    }

    fn firm_rank(&self, w: WorkerId, f: Option<FirmId>) -> usize {
        let n = self.worker_prefs[w.0].len();
        match f {
            None => n,
            Some(f) => self.worker_rank[w.0][f.0].unwrap_or(n + 1),
        }
    }

    /// `f ≻_w g`, with `None` standing for being unmatched.
    pub fn worker_prefers(&self, w: WorkerId, f: Option<FirmId>, g: Option<FirmId>) -> bool {
        f != g && self.firm_rank(w, f) < self.firm_rank(w, g)
    }

    /// `f ⪰_w g`.
    pub fn worker_weakly_prefers(&self, w: WorkerId, f: Option<FirmId>, g: Option<FirmId>) -> bool {
        f == g || self.worker_prefers(w, f, g)
    }
}

#[derive(Debug, Clone, Default)]
pub struct DiscreteMarketBuilder {
    raw: RawDiscreteMarket,
}

impl DiscreteMarketBuilder {
    /// Adds a firm with its ranked acceptable sets, best first.
    pub fn firm<S, N>(mut self, name: &str, prefs: impl IntoIterator<Item = S>) -> Self
    where
        S: IntoIterator<Item = N>,
        N: AsRef<str>,
    {
        let prefs = prefs
            .into_iter()
            .map(|s| s.into_iter().map(|n| n.as_ref().to_string()).collect())
            .collect();
        self.raw.firms.push((name.to_string(), prefs));
        self
    }

    /// Adds a worker with its ranked acceptable firms, best first.
    pub fn worker<N: AsRef<str>>(mut self, name: &str, prefs: impl IntoIterator<Item = N>) -> Self {
        let prefs = prefs.into_iter().map(|n| n.as_ref().to_string()).collect();
        self.raw.workers.push((name.to_string(), prefs));
        self
    }

    pub fn raw(&self) -> &RawDiscreteMarket {
        &self.raw
    }

    pub fn build(self) -> Result<DiscreteMarket> {
        DiscreteMarket::from_raw(self.raw)
    }
}

/// Assignment of each worker to a firm or to nobody.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscreteMatching {
    assignment: Vec<Option<FirmId>>,
}

impl DiscreteMatching {
    pub fn new(roster: &Roster, assignment: Vec<Option<FirmId>>) -> Result<Self> {
        if assignment.len() != roster.worker_count() {
            return Err(Error::Precondition(format!(
                "matching covers {} workers, market has {}",
                assignment.len(),
                roster.worker_count()
            )));
        }
        if let Some(f) = assignment.iter().flatten().find(|f| f.0 >= roster.firm_count()) {
            return Err(Error::UnknownFirm(format!("#{}", f.0)));
        }
        Ok(DiscreteMatching { assignment })
    }

    pub fn empty(roster: &Roster) -> Self {
        DiscreteMatching {
            assignment: vec![None; roster.worker_count()],
        }
    }

    /// Builds a matching from `(firm, workers)` pairs; unlisted workers stay
    /// unmatched.
    pub fn from_sets(roster: &Roster, sets: &[(FirmId, WorkerSet)]) -> Result<Self> {
        let mut m = Self::empty(roster);
        for (f, s) in sets {
            for w in s.iter() {
                if w.0 >= roster.worker_count() {
                    return Err(Error::UnknownWorker(format!("#{}", w.0)));
                }
                if m.assignment[w.0].is_some() {
                    return Err(Error::Precondition(format!(
                        "worker {} assigned twice",
                        roster.worker_name(w)
                    )));
                }
                m.assignment[w.0] = Some(*f);
            }
        }
        Ok(m)
    }

    /// Name-based [`from_sets`](Self::from_sets).
    pub fn from_names(roster: &Roster, sets: &[(&str, &[&str])]) -> Result<Self> {
        let resolved = sets
            .iter()
            .map(|(f, ws)| Ok((roster.firm(f)?, roster.workers_from_names(ws)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_sets(roster, &resolved)
    }

    pub fn assignment(&self) -> &[Option<FirmId>] {
        &self.assignment
    }

    pub fn firm_of(&self, w: WorkerId) -> Option<FirmId> {
        self.assignment[w.0]
    }

    pub fn firm_set(&self, f: FirmId) -> WorkerSet {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == Some(f))
            .map(|(w, _)| WorkerId(w))
            .collect()
    }

    pub(crate) fn set_worker(&mut self, w: WorkerId, f: Option<FirmId>) {
        self.assignment[w.0] = f;
    }

    /// `f1:{w1,w2} f2:{w3}` style label; `∅` for the empty matching.
    pub fn label(&self, roster: &Roster) -> String {
        let parts: Vec<String> = roster
            .firms()
            .filter_map(|f| {
                let s = self.firm_set(f);
                (!s.is_empty()).then(|| format!("{}:{}", roster.firm_name(f), roster.set_label(s)))
            })
            .collect();
        if parts.is_empty() {
            "∅".into()
        } else {
            parts.join(" ")
        }
    }
}
