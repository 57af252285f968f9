//! Technology roadmaps: directed trees whose vertices each demand a worker
//! set `W^v`.
//!
//! Worker `w` engages in the subgraph induced by `{v : w ∈ W^v}` and is a
//! specialist when that subgraph is a directed path or a single vertex.
//! Firms are specialized when each firm owns a directed path (or vertex),
//! the paths are vertex-disjoint, and every acceptable set of a firm is
//! `W^v` for some `v` on its path. Specialist workers and specialized firms
//! together force a balanced firm-worker hypergraph.

use std::fmt;

use crate::error::{Error, Result};
use crate::hypergraph::{Balance, FirmWorkerHypergraph};
use crate::model::{FirmId, Market, Roster, WorkerId, WorkerSet};

/// Roadmap as read from a file: named technologies with their demanded
/// worker names, and directed edges between technology names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawRoadmap {
    pub technologies: Vec<(String, Vec<String>)>,
    pub edges: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoadmapViolation {
    NoTechnologies,
    DuplicateTechnology(String),
    EmptyDemand(String),
    UnknownWorker { technology: String, worker: String },
    UnknownTechnology(String),
    SelfLoop(String),
    /// Adding this edge closes an undirected cycle.
    UndirectedCycle { from: String, to: String },
    Disconnected,
}

impl fmt::Display for RoadmapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoadmapViolation::NoTechnologies => write!(f, "roadmap has no technologies"),
            RoadmapViolation::DuplicateTechnology(v) => write!(f, "technology {v} declared twice"),
            RoadmapViolation::EmptyDemand(v) => write!(f, "technology {v} demands no workers"),
            RoadmapViolation::UnknownWorker { technology, worker } => {
                write!(f, "technology {technology} demands unknown worker {worker}")
            }
            RoadmapViolation::UnknownTechnology(v) => write!(f, "edge mentions unknown technology {v}"),
            RoadmapViolation::SelfLoop(v) => write!(f, "self-loop at {v}"),
            RoadmapViolation::UndirectedCycle { from, to } => {
                write!(f, "edge {from}->{to} closes an undirected cycle")
            }
            RoadmapViolation::Disconnected => write!(f, "roadmap is disconnected"),
        }
    }
}

/// A validated roadmap bound to a market's roster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roadmap {
    roster: Roster,
    names: Vec<String>,
    demanded: Vec<WorkerSet>,
    edges: Vec<(usize, usize)>,
}

/// Checks the tree shape and worker references, collecting every problem.
pub fn validate_roadmap(raw: &RawRoadmap, roster: &Roster) -> std::result::Result<Roadmap, Vec<RoadmapViolation>> {
    let mut out = Vec::new();
    if raw.technologies.is_empty() {
        out.push(RoadmapViolation::NoTechnologies);
    }
    let mut names: Vec<String> = Vec::new();
    let mut demanded = Vec::new();
    for (v, ws) in &raw.technologies {
        if names.contains(v) {
            out.push(RoadmapViolation::DuplicateTechnology(v.clone()));
            continue;
        }
        if ws.is_empty() {
            out.push(RoadmapViolation::EmptyDemand(v.clone()));
        }
        let mut set = WorkerSet::EMPTY;
        for w in ws {
            match roster.worker(w) {
                Ok(id) => set.insert(id),
                Err(_) => out.push(RoadmapViolation::UnknownWorker {
                    technology: v.clone(),
                    worker: w.clone(),
                }),
            }
        }
        names.push(v.clone());
        demanded.push(set);
    }

    let mut parent: Vec<usize> = (0..names.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut edges = Vec::new();
    let mut components = names.len();
    for (a, b) in &raw.edges {
        let ia = names.iter().position(|n| n == a);
        let ib = names.iter().position(|n| n == b);
        let (Some(ia), Some(ib)) = (ia, ib) else {
            for (n, i) in [(a, ia), (b, ib)] {
                if i.is_none() {
                    out.push(RoadmapViolation::UnknownTechnology(n.clone()));
                }
            }
            continue;
        };
        if ia == ib {
            out.push(RoadmapViolation::SelfLoop(a.clone()));
            continue;
        }
        let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
        if ra == rb {
            out.push(RoadmapViolation::UndirectedCycle {
                from: a.clone(),
                to: b.clone(),
            });
            continue;
        }
        parent[ra] = rb;
        components -= 1;
        edges.push((ia, ib));
    }
    if components > 1 {
        out.push(RoadmapViolation::Disconnected);
    }
    if out.is_empty() {
        Ok(Roadmap {
            roster: roster.clone(),
            names,
            demanded,
            edges,
        })
    } else {
        Err(out)
    }
}

impl Roadmap {
    pub fn new(raw: &RawRoadmap, roster: &Roster) -> Result<Self> {
        validate_roadmap(raw, roster).map_err(|v| {
            Error::Params(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
        })
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `W^v`.
    pub fn demanded(&self, v: usize) -> WorkerSet {
        self.demanded[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn to_raw(&self) -> RawRoadmap {
        RawRoadmap {
            technologies: self
                .names
                .iter()
                .zip(&self.demanded)
                .map(|(n, s)| (n.clone(), self.roster.set_names(*s)))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect(),
        }
    }

    /// `G^w`: the technologies demanding `w` and the edges among them.
    pub fn worker_subgraph(&self, w: WorkerId) -> Subgraph {
        let vertices: Vec<usize> = (0..self.vertex_count())
            .filter(|&v| self.demanded[v].contains(w))
            .collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|(a, b)| vertices.contains(a) && vertices.contains(b))
            .collect();
        Subgraph { vertices, edges }
    }

    pub fn worker_subgraph_by_name(&self, w: &str) -> Result<Subgraph> {
        Ok(self.worker_subgraph(self.roster.worker(w)?))
    }

    /// True when `G^w` is empty, a single vertex or a directed path.
    pub fn is_specialist(&self, w: WorkerId) -> bool {
        self.worker_subgraph(w).is_path()
    }

    /// Single vertices and directed paths of at least two vertices, ordered
    /// by vertex count and then by `(start, end)`.
    pub fn technology_paths(&self) -> Vec<TechnologyPath> {
        let mut out: Vec<TechnologyPath> = (0..self.vertex_count())
            .map(|v| TechnologyPath { vertices: vec![v] })
            .collect();
        let mut stack: Vec<Vec<usize>> = out.iter().map(|p| p.vertices.clone()).collect();
        while let Some(p) = stack.pop() {
            let last = *p.last().expect("non-empty");
            for &(a, b) in &self.edges {
                if a == last {
                    let mut q = p.clone();
                    q.push(b);
                    out.push(TechnologyPath { vertices: q.clone() });
                    stack.push(q);
                }
            }
        }
        out.sort_by_key(|p| (p.vertices.len(), p.vertices[0], *p.vertices.last().expect("non-empty")));
        out
    }
}

/// Induced subgraph on technology indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Subgraph {
    pub fn is_path(&self) -> bool {
        let k = self.vertices.len();
        if k <= 1 {
            return true;
        }
        // Subgraphs of a tree are forests, so k - 1 edges means connected.
        if self.edges.len() != k - 1 {
            return false;
        }
        self.vertices.iter().all(|v| {
            self.edges.iter().filter(|e| e.0 == *v).count() <= 1
                && self.edges.iter().filter(|e| e.1 == *v).count() <= 1
        })
    }
}

/// A directed path (or single vertex), listed tail to tip.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TechnologyPath {
    pub vertices: Vec<usize>,
}

impl TechnologyPath {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.vertices.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// `v1->v3->v4`.
    pub fn label(&self, r: &Roadmap) -> String {
        let names: Vec<&str> = self.vertices.iter().map(|&v| r.name(v)).collect();
        names.join("->")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Specialization {
    /// One path per firm; `None` for firms without acceptable sets.
    Specialized { paths: Vec<Option<TechnologyPath>> },
    NotSpecialized { reason: String },
}

impl Specialization {
    pub fn is_specialized(&self) -> bool {
        matches!(self, Specialization::Specialized { .. })
    }
}

fn candidates(m: &Market, r: &Roadmap) -> Vec<Option<Vec<TechnologyPath>>> {
    let paths = r.technology_paths();
    m.roster()
        .firms()
        .map(|f| {
            let sets = m.acceptable_sets(f);
            if sets.is_empty() {
                return None;
            }
            Some(
                paths
                    .iter()
                    .filter(|p| {
                        sets.iter()
                            .all(|s| p.vertices.iter().any(|&v| r.demanded(v) == *s))
                    })
                    .cloned()
                    .collect(),
            )
        })
        .collect()
}

fn search(
    cands: &[Option<Vec<TechnologyPath>>],
    f: usize,
    used: &mut Vec<bool>,
    cur: &mut Vec<Option<TechnologyPath>>,
    out: &mut Vec<Vec<Option<TechnologyPath>>>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if f == cands.len() {
        out.push(cur.clone());
        return;
    }
    let Some(list) = &cands[f] else {
        cur.push(None);
        search(cands, f + 1, used, cur, out, limit);
        cur.pop();
        return;
    };
    for p in list {
        if p.vertices.iter().any(|&v| used[v]) {
            continue;
        }
        for &v in &p.vertices {
            used[v] = true;
        }
        cur.push(Some(p.clone()));
        search(cands, f + 1, used, cur, out, limit);
        cur.pop();
        for &v in &p.vertices {
            used[v] = false;
        }
        if out.len() >= limit {
            return;
        }
    }
}

/// The first vertex-disjoint path assignment in search order (firms by id,
/// paths by length and endpoints), or why none exists.
pub fn check_specialized(m: &Market, r: &Roadmap) -> Specialization {
    let cands = candidates(m, r);
    if let Some(f) = cands.iter().position(|c| c.as_ref().is_some_and(Vec::is_empty)) {
        return Specialization::NotSpecialized {
            reason: format!(
                "no technology path covers every acceptable set of {}",
                m.roster().firm_name(FirmId(f))
            ),
        };
    }
    let mut out = Vec::new();
    search(&cands, 0, &mut vec![false; r.vertex_count()], &mut Vec::new(), &mut out, 1);
    match out.pop() {
        Some(paths) => Specialization::Specialized { paths },
        None => Specialization::NotSpecialized {
            reason: "the firms' candidate paths cannot be chosen vertex-disjoint".into(),
        },
    }
}

/// Every witness collection, up to `limit`, in search order.
pub fn all_specializations(m: &Market, r: &Roadmap, limit: usize) -> Vec<Vec<Option<TechnologyPath>>> {
    let cands = candidates(m, r);
    let mut out = Vec::new();
    search(&cands, 0, &mut vec![false; r.vertex_count()], &mut Vec::new(), &mut out, limit);
    out
}

/// Re-checks a witness directly against the definition.
pub fn verify_specialization(m: &Market, r: &Roadmap, paths: &[Option<TechnologyPath>]) -> bool {
    if paths.len() != m.roster().firm_count() {
        return false;
    }
    let mut used = vec![false; r.vertex_count()];
    for (f, p) in m.roster().firms().zip(paths) {
        let sets = m.acceptable_sets(f);
        let Some(p) = p else {
            if sets.is_empty() {
                continue;
            }
            return false;
        };
        let is_path = p.edges().iter().all(|e| r.edges().contains(e));
        let covers = sets
            .iter()
            .all(|s| p.vertices.iter().any(|&v| r.demanded(v) == *s));
        if p.vertices.is_empty() || !is_path || !covers {
            return false;
        }
        for &v in &p.vertices {
            if v >= used.len() || used[v] {
                return false;
            }
            used[v] = true;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem3Report {
    pub non_specialists: Vec<WorkerId>,
    pub specialization: Specialization,
    pub balance: Balance,
}

impl Theorem3Report {
    pub fn all_specialists(&self) -> bool {
        self.non_specialists.is_empty()
    }

    /// All three conditions hold.
    pub fn holds(&self) -> bool {
        self.all_specialists() && self.specialization.is_specialized() && self.balance.is_balanced()
    }

    /// Specialists and specialized firms with an unbalanced hypergraph,
    /// which the theory rules out.
    pub fn falsified(&self) -> bool {
        self.all_specialists() && self.specialization.is_specialized() && !self.balance.is_balanced()
    }
}

pub fn theorem3_report(m: &Market, r: &Roadmap, budget: u64) -> Result<Theorem3Report> {
    if m.roster() != r.roster() {
        return Err(Error::Precondition("roadmap was validated against another market".into()));
    }
    let non_specialists = m.roster().workers().filter(|&w| !r.is_specialist(w)).collect();
    let specialization = check_specialized(m, r);
    let balance = FirmWorkerHypergraph::build(m).check_balanced(budget)?;
    Ok(Theorem3Report {
        non_specialists,
        specialization,
        balance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiscreteMarket, TuMarket};
    use crate::DEFAULT_BUDGET;

    fn raw(techs: &[(&str, &[&str])], edges: &[(&str, &str)]) -> RawRoadmap {
        RawRoadmap {
            technologies: techs
                .iter()
                .map(|(v, ws)| (v.to_string(), ws.iter().map(|w| w.to_string()).collect()))
                .collect(),
            edges: edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }

    fn profile13() -> Market {
        Market::Discrete(
            DiscreteMarket::builder()
                .firm("f1", [vec!["w2", "w4"], vec!["w1"]])
                .firm("f2", [vec!["w2", "w3"]])
                .firm("f3", [vec!["w1", "w5"], vec!["w5"]])
                .worker("w1", ["f1", "f3"])
                .worker("w2", ["f1", "f2"])
                .worker("w3", ["f2"])
                .worker("w4", ["f1"])
                .worker("w5", ["f3"])
                .build()
                .unwrap(),
        )
    }

    fn example4(m: &Market) -> Roadmap {
        Roadmap::new(
            &raw(
                &[
                    ("v1", &["w1"]),
                    ("v2", &["w2", "w3"]),
                    ("v3", &["w1", "w2"]),
                    ("v4", &["w2", "w4"]),
                    ("v5", &["w1", "w5"]),
                    ("v6", &["w5"]),
                ],
                &[("v1", "v3"), ("v2", "v3"), ("v3", "v4"), ("v3", "v5"), ("v6", "v5")],
            ),
            m.roster(),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let m = profile13();
        example4(&m);
        assert!(validate_roadmap(&raw(&[("a", &["w1"]), ("b", &["w2"])], &[("a", "b")]), m.roster()).is_ok());
        let err = validate_roadmap(
            &raw(
                &[("v1", &["w1"]), ("v2", &["w1"]), ("v3", &["w1"])],
                &[("v1", "v2"), ("v2", "v3"), ("v3", "v1")],
            ),
            m.roster(),
        )
        .unwrap_err();
        assert!(matches!(err[0], RoadmapViolation::UndirectedCycle { .. }));
        let err = validate_roadmap(&raw(&[("a", &["w1"]), ("b", &["zz"])], &[]), m.roster()).unwrap_err();
        assert!(err.contains(&RoadmapViolation::Disconnected));
        assert!(err.iter().any(|v| matches!(v, RoadmapViolation::UnknownWorker { .. })));
    }

    #[test]
    fn subgraphs_and_specialists() {
        let m = profile13();
        let r = example4(&m);
        let g = r.worker_subgraph_by_name("w1").unwrap();
        assert_eq!(g.vertices, vec![0, 2, 4]);
        assert_eq!(g.edges, vec![(0, 2), (2, 4)]);
        assert!(m.roster().workers().all(|w| r.is_specialist(w)));
        assert!(r.worker_subgraph_by_name("nobody").is_err());
    }

    #[test]
    fn counter_roadmap_one() {
        let m = Market::Discrete(
            DiscreteMarket::builder()
                .firm("f1", [vec!["w1", "w2"]])
                .firm("f2", [vec!["w1"], vec!["w2"]])
                .worker("w1", ["f1", "f2"])
                .worker("w2", ["f2", "f1"])
                .build()
                .unwrap(),
        );
        let r = Roadmap::new(
            &raw(&[("v1", &["w1"]), ("v2", &["w2"]), ("v3", &["w1", "w2"])], &[("v1", "v2"), ("v2", "v3")]),
            m.roster(),
        )
        .unwrap();
        let g = r.worker_subgraph_by_name("w1").unwrap();
        assert_eq!(g.vertices, vec![0, 2]);
        assert!(g.edges.is_empty());
        let rep = theorem3_report(&m, &r, DEFAULT_BUDGET).unwrap();
        assert_eq!(rep.non_specialists, vec![WorkerId(0)]);
        assert!(rep.specialization.is_specialized());
        assert!(!rep.balance.is_balanced());
        assert!(!rep.falsified());
    }

    #[test]
    fn example4_specialized() {
        let m = profile13();
        let r = example4(&m);
        let Specialization::Specialized { paths } = check_specialized(&m, &r) else {
            panic!("expected specialized");
        };
        let labels: Vec<String> = paths.iter().map(|p| p.as_ref().unwrap().label(&r)).collect();
        assert_eq!(labels, ["v1->v3->v4", "v2", "v6->v5"]);
        assert!(verify_specialization(&m, &r, &paths));
        let rep = theorem3_report(&m, &r, DEFAULT_BUDGET).unwrap();
        assert!(rep.holds());
    }

    #[test]
    fn two_witnesses_first_returned() {
        let m = Market::Tu(
            TuMarket::builder()
                .firm("f", [(vec!["w"], 1)])
                .wage_worker("w")
                .build()
                .unwrap(),
        );
        let r = Roadmap::new(&raw(&[("v1", &["w"]), ("v2", &["w"])], &[("v1", "v2")]), m.roster()).unwrap();
        let all = all_specializations(&m, &r, 10);
        // v1, v2 and v1->v2 all cover {w}.
        assert_eq!(all.len(), 3);
        let Specialization::Specialized { paths } = check_specialized(&m, &r) else {
            panic!();
        };
        assert_eq!(paths[0].as_ref().unwrap().vertices, vec![0]);
    }

    #[test]
    fn counter_roadmap_two() {
        let m = Market::Discrete(
            DiscreteMarket::builder()
                .firm("f1", [vec!["w1", "w2"]])
                .firm("f2", [vec!["w1"], vec!["w2"]])
                .worker("w1", ["f1", "f2"])
                .worker("w2", ["f2", "f1"])
                .build()
                .unwrap(),
        );
        let r = Roadmap::new(
            &raw(&[("v1", &["w1"]), ("v2", &["w1", "w2"]), ("v3", &["w2"])], &[("v1", "v2"), ("v2", "v3")]),
            m.roster(),
        )
        .unwrap();
        assert!(!check_specialized(&m, &r).is_specialized());
    }

    #[test]
    fn firm_without_sets_gets_none() {
        let m = Market::Discrete(
            DiscreteMarket::builder()
                .firm("f", Vec::<Vec<&str>>::new())
                .worker("w", ["f"])
                .build()
                .unwrap(),
        );
        let r = Roadmap::new(&raw(&[("v", &["w"])], &[]), m.roster()).unwrap();
        assert_eq!(
            check_specialized(&m, &r),
            Specialization::Specialized { paths: vec![None] }
        );
    }
}
