//! Market data model shared by every analysis.
//!
//! Markets are entered in a name-based "raw" form (what a file or a builder
//! produces) and become [`TuMarket`] / [`DiscreteMarket`] only after
//! validation, so every value of those types satisfies the structural
//! invariants: unique names, known references, no empty acceptable sets and
//! strict preference lists.

mod discrete;
mod sets;
mod tu;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub use discrete::{DiscreteMarket, DiscreteMarketBuilder, DiscreteMatching, RawDiscreteMarket};
pub use sets::{AgentId, FirmId, WorkerId, WorkerSet, MAX_WORKERS};
pub use tu::{
    Coalition, RawTuMarket, TuMarket, TuMarketBuilder, TuMatching, Utilities,
};

use crate::error::{Error, Result};

/// Exact rational value used for every valuation, price and LP quantity.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Conversion used by the market builders so fixtures can be written with
/// plain integers.
pub trait IntoValue {
    fn into_value(self) -> Rational;
}

impl IntoValue for i64 {
    fn into_value(self) -> Rational {
        int(self)
    }
}

impl IntoValue for i32 {
    fn into_value(self) -> Rational {
        int(self.into())
    }
}

impl IntoValue for Rational {
    fn into_value(self) -> Rational {
        self
    }
}

impl IntoValue for (i64, i64) {
    fn into_value(self) -> Rational {
        ratio(self.0, self.1)
    }
}

/// Parses `"p/q"` or an integer string into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let int_part = |t: &str| -> Result<BigInt> {
        let t = t.trim();
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse().map_err(|_| bad())
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(int_part(s)?)),
        Some((n, d)) => {
            let d = int_part(d)?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(int_part(n)?, d))
        }
    }
}

/// `6`, `-1/2`: the inverse of [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Either kind of market, for code paths that accept both.
#[derive(Debug, Clone, PartialEq)]
pub enum Market {
    Tu(TuMarket),
    Discrete(DiscreteMarket),
}

impl Market {
    pub fn roster(&self) -> &Roster {
        match self {
            Market::Tu(m) => m.roster(),
            Market::Discrete(m) => m.roster(),
        }
    }

    /// Acceptable sets per firm, in listed order.
    pub fn acceptable_sets(&self, f: FirmId) -> Vec<WorkerSet> {
        match self {
            Market::Tu(m) => m.acceptable_sets(f).iter().map(|(s, _)| *s).collect(),
            Market::Discrete(m) => m.firm_prefs(f).to_vec(),
        }
    }
}

/// Names of the agents of one market, indexed by [`FirmId`] / [`WorkerId`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Roster {
    firms: Vec<String>,
    workers: Vec<String>,
}

impl Roster {
    pub(crate) fn new(firms: Vec<String>, workers: Vec<String>) -> Self {
        Roster { firms, workers }
    }

    pub fn firm_count(&self) -> usize {
        self.firms.len()
    }

    pub fn worker_count(&self) -> usize {
        self.workers.len()
    }

    pub fn agent_count(&self) -> usize {
        self.firms.len() + self.workers.len()
    }

    pub fn firms(&self) -> impl Iterator<Item = FirmId> {
        (0..self.firms.len()).map(FirmId)
    }

    pub fn workers(&self) -> impl Iterator<Item = WorkerId> {
        (0..self.workers.len()).map(WorkerId)
    }

    /// All agents, firms first.
    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.firms()
            .map(AgentId::Firm)
            .chain(self.workers().map(AgentId::Worker))
    }

    pub fn all_workers(&self) -> WorkerSet {
        WorkerSet::full(self.workers.len())
    }

    pub fn firm_name(&self, f: FirmId) -> &str {
        &self.firms[f.0]
    }

    pub fn worker_name(&self, w: WorkerId) -> &str {
        &self.workers[w.0]
    }

    pub fn firm_names(&self) -> &[String] {
        &self.firms
    }

    pub fn worker_names(&self) -> &[String] {
        &self.workers
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        match a {
            AgentId::Firm(f) => self.firm_name(f),
            AgentId::Worker(w) => self.worker_name(w),
        }
    }

    pub fn firm(&self, name: &str) -> Result<FirmId> {
        self.firms
            .iter()
            .position(|n| n == name)
            .map(FirmId)
            .ok_or_else(|| Error::UnknownFirm(name.to_string()))
    }

    pub fn worker(&self, name: &str) -> Result<WorkerId> {
        self.workers
            .iter()
            .position(|n| n == name)
            .map(WorkerId)
            .ok_or_else(|| Error::UnknownWorker(name.to_string()))
    }

    /// Position of an agent in the firms-then-workers order.
    pub fn agent_index(&self, a: AgentId) -> usize {
        match a {
            AgentId::Firm(f) => f.0,
            AgentId::Worker(w) => self.firms.len() + w.0,
        }
    }

    pub fn agent_at(&self, i: usize) -> AgentId {
        if i < self.firms.len() {
            AgentId::Firm(FirmId(i))
        } else {
            AgentId::Worker(WorkerId(i - self.firms.len()))
        }
    }

    pub fn set_names(&self, s: WorkerSet) -> Vec<String> {
        s.iter().map(|w| self.worker_name(w).to_string()).collect()
    }

    /// `{w1,w2}` style label.
    pub fn set_label(&self, s: WorkerSet) -> String {
        format!("{{{}}}", self.set_names(s).join(","))
    }

    pub fn workers_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<WorkerSet> {
        names.iter().map(|n| self.worker(n.as_ref())).collect()
    }
}

/// One broken invariant found by market validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyName,
    DuplicateFirm(String),
    DuplicateWorker(String),
    /// A name used both for a firm and a worker.
    NameClash(String),
    TooManyWorkers(usize),
    UnknownWorker { firm: String, worker: String },
    UnknownFirm { worker: String, firm: String },
    EmptyAcceptableSet { firm: String },
    DuplicateSet { firm: String, set: Vec<String> },
    DuplicateFirmInPrefs { worker: String, firm: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyName => write!(f, "empty agent name"),
            Violation::DuplicateFirm(n) => write!(f, "duplicate firm `{n}`"),
            Violation::DuplicateWorker(n) => write!(f, "duplicate worker `{n}`"),
            Violation::NameClash(n) => write!(f, "`{n}` is both a firm and a worker"),
            Violation::TooManyWorkers(n) => {
                write!(f, "{n} workers exceeds the supported maximum of {MAX_WORKERS}")
            }
            Violation::UnknownWorker { firm, worker } => {
                write!(f, "firm `{firm}` lists unknown worker `{worker}`")
            }
            Violation::UnknownFirm { worker, firm } => {
                write!(f, "worker `{worker}` lists unknown firm `{firm}`")
            }
            Violation::EmptyAcceptableSet { firm } => {
                write!(f, "firm `{firm}` lists the empty set as acceptable")
            }
            Violation::DuplicateSet { firm, set } => {
                write!(f, "firm `{firm}` lists {{{}}} more than once", set.join(","))
            }
            Violation::DuplicateFirmInPrefs { worker, firm } => {
                write!(f, "worker `{worker}` lists firm `{firm}` more than once")
            }
        }
    }
}

/// Checks agent names and returns the roster they define.
pub(crate) fn check_names(
    firms: &[&String],
    workers: &[&String],
    out: &mut Vec<Violation>,
) -> Roster {
    let mut seen_f = std::collections::HashSet::new();
    let mut seen_w = std::collections::HashSet::new();
    for n in firms {
        if n.is_empty() {
            out.push(Violation::EmptyName);
        } else if !seen_f.insert(n.as_str()) {
            out.push(Violation::DuplicateFirm(n.to_string()));
        }
    }
    for n in workers {
        if n.is_empty() {
            out.push(Violation::EmptyName);
        } else if !seen_w.insert(n.as_str()) {
            out.push(Violation::DuplicateWorker(n.to_string()));
        }
        if seen_f.contains(n.as_str()) {
            out.push(Violation::NameClash(n.to_string()));
        }
    }
    if workers.len() > MAX_WORKERS {
        out.push(Violation::TooManyWorkers(workers.len()));
    }
    Roster::new(
        firms.iter().map(|s| s.to_string()).collect(),
        workers.iter().map(|s| s.to_string()).collect(),
    )
}

/// Resolves a firm's worker-name list, reporting unknown names.
pub(crate) fn resolve_set(
    roster: &Roster,
    firm: &str,
    names: &[String],
    out: &mut Vec<Violation>,
) -> Option<WorkerSet> {
    let mut set = WorkerSet::EMPTY;
    let mut ok = true;
    for n in names {
        match roster.worker(n) {
            Ok(w) if w.0 < MAX_WORKERS => set.insert(w),
            _ => {
                out.push(Violation::UnknownWorker {
                    firm: firm.to_string(),
                    worker: n.clone(),
                });
                ok = false;
            }
        }
    }
    if ok && set.is_empty() {
        out.push(Violation::EmptyAcceptableSet {
            firm: firm.to_string(),
        });
        ok = false;
    }
    ok.then_some(set)
}

/// Verdict of market validation: `Ok` or every violation found.
pub fn validate_market(raw: &RawMarket) -> std::result::Result<(), Vec<Violation>> {
    match raw {
        RawMarket::Tu(m) => TuMarket::check(m).map(|_| ()),
        RawMarket::Discrete(m) => DiscreteMarket::check(m).map(|_| ()),
    }
}

/// Name-based market of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum RawMarket {
    Tu(RawTuMarket),
    Discrete(RawDiscreteMarket),
}

impl RawMarket {
    pub fn into_market(self) -> Result<Market> {
        Ok(match self {
            RawMarket::Tu(m) => Market::Tu(TuMarket::from_raw(m)?),
            RawMarket::Discrete(m) => Market::Discrete(DiscreteMarket::from_raw(m)?),
        })
    }
}
