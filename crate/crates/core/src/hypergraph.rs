//! Firm-worker hypergraphs, cycle search and balancedness.
//!
//! A cycle is a cyclic alternating sequence `(j¹, E¹, j², …, jᵏ, Eᵏ, j¹)` of
//! distinct vertices and distinct edges with `k ≥ 2` and `jⁱ, jⁱ⁺¹ ∈ Eⁱ`.
//! It is *nontrivial odd* when `k` is odd and every `Eⁱ` contains exactly
//! two of the cycle's vertices. A hypergraph without such a cycle is
//! balanced.
//!
//! Balancedness is decided by exhaustive depth-first search over alternating
//! sequences. Each cycle is generated once: it is rooted at its smallest
//! vertex and walked in the direction whose second vertex is smaller than
//! its last (for 2-cycles, whose first edge index is smaller). That rooted
//! orientation is also the canonical form used for output order.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::model::{
    AgentId, DiscreteMarket, FirmId, Market, Roster, TuMarket, WorkerId, WorkerSet,
};

/// Edge `{firm} ∪ workers`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HyperEdge {
    pub firm: FirmId,
    pub workers: WorkerSet,
}

impl HyperEdge {
    pub fn contains(&self, a: AgentId) -> bool {
        match a {
            AgentId::Firm(f) => f == self.firm,
            AgentId::Worker(w) => self.workers.contains(w),
        }
    }

    pub fn members(&self) -> impl Iterator<Item = AgentId> + '_ {
        std::iter::once(AgentId::Firm(self.firm)).chain(self.workers.iter().map(AgentId::Worker))
    }

    pub fn size(&self) -> usize {
        1 + self.workers.len()
    }
}

/// Hypergraph on all firms and workers (isolated agents included) whose
/// edges each hold exactly one firm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirmWorkerHypergraph {
    roster: Roster,
    edges: Vec<HyperEdge>,
}

impl FirmWorkerHypergraph {
    pub fn new(roster: Roster, edges: Vec<HyperEdge>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.firm.0 >= roster.firm_count() {
                return Err(Error::UnknownFirm(format!("#{}", e.firm.0)));
            }
            if e.workers.is_empty() {
                return Err(Error::Precondition(format!("edge {i} has no workers")));
            }
            if !e.workers.is_subset(roster.all_workers()) {
                return Err(Error::Precondition(format!("edge {i} has unknown workers")));
            }
            if edges[..i].contains(e) {
                return Err(Error::Precondition(format!("edge {i} is a duplicate")));
            }
        }
        Ok(FirmWorkerHypergraph { roster, edges })
    }

    /// One edge per firm and acceptable set.
    pub fn from_tu(m: &TuMarket) -> Self {
        let edges = m
            .roster()
            .firms()
            .flat_map(|f| {
                m.acceptable_sets(f)
                    .iter()
                    .map(move |(s, _)| HyperEdge { firm: f, workers: *s })
            })
            .collect();
        FirmWorkerHypergraph {
            roster: m.roster().clone(),
            edges,
        }
    }

    /// One edge per firm and satisfactory set.
    pub fn from_discrete(m: &DiscreteMarket) -> Self {
        let edges = m
            .roster()
            .firms()
            .flat_map(|f| {
                m.satisfactory_sets(f)
                    .into_iter()
                    .map(move |s| HyperEdge { firm: f, workers: s })
            })
            .collect();
        FirmWorkerHypergraph {
            roster: m.roster().clone(),
            edges,
        }
    }

    pub fn build(m: &Market) -> Self {
        match m {
            Market::Tu(m) => Self::from_tu(m),
            Market::Discrete(m) => Self::from_discrete(m),
        }
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn edges(&self) -> &[HyperEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.roster.agent_count()
    }

    pub fn vertices(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.roster.agents()
    }

    pub fn edge_label(&self, i: usize) -> String {
        let e = &self.edges[i];
        let names: Vec<&str> = e.members().map(|a| self.roster.agent_name(a)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Hypergraph restricted to the edges selected by `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(&HyperEdge) -> bool) -> Self {
        FirmWorkerHypergraph {
            roster: self.roster.clone(),
            edges: self.edges.iter().copied().filter(|e| keep(e)).collect(),
        }
    }

    /// 0/1 matrix with one row per agent (firms first) and one column per
    /// edge.
    pub fn incidence_matrix(&self) -> IntMatrix {
        let rows: Vec<String> = self
            .vertices()
            .map(|a| self.roster.agent_name(a).to_string())
            .collect();
        let cols: Vec<String> = (0..self.edges.len()).map(|i| self.edge_label(i)).collect();
        let entries = self
            .vertices()
            .map(|a| self.edges.iter().map(|e| i64::from(e.contains(a))).collect())
            .collect();
        IntMatrix::new(rows, cols, entries).expect("dimensions agree by construction")
    }

    /// Whether `c` is a cycle of this hypergraph.
    pub fn is_cycle(&self, c: &HyperCycle) -> Result<bool> {
        if let Some(&i) = c.edges.iter().find(|&&i| i >= self.edges.len()) {
            return Err(Error::EdgeOutOfRange {
                index: i,
                edges: self.edges.len(),
            });
        }
        let k = c.edges.len();
        if k < 2 || c.vertices.len() != k {
            return Ok(false);
        }
        if c.vertices.iter().any(|a| !self.has_vertex(*a)) {
            return Ok(false);
        }
        if !all_distinct(&c.vertices) || !all_distinct(&c.edges) {
            return Ok(false);
        }
        Ok((0..k).all(|i| {
            let e = &self.edges[c.edges[i]];
            e.contains(c.vertices[i]) && e.contains(c.vertices[(i + 1) % k])
        }))
    }

    /// Odd length and every edge meets exactly two cycle vertices. Assumes
    /// `c` is a cycle.
    pub fn is_nontrivial_odd(&self, c: &HyperCycle) -> bool {
        c.len() % 2 == 1 && self.is_nontrivial(c)
    }

    fn is_nontrivial(&self, c: &HyperCycle) -> bool {
        c.edges.iter().all(|&i| {
            let e = &self.edges[i];
            c.vertices.iter().filter(|a| e.contains(**a)).count() == 2
        })
    }

    fn has_vertex(&self, a: AgentId) -> bool {
        match a {
            AgentId::Firm(f) => f.0 < self.roster.firm_count(),
            AgentId::Worker(w) => w.0 < self.roster.worker_count(),
        }
    }

    /// All cycles up to rotation and reflection, in canonical order.
    pub fn enumerate_cycles(&self, filter: CycleFilter, budget: u64) -> Result<Vec<HyperCycle>> {
        let mut out = Vec::new();
        self.search_cycles(filter, budget, |c| {
            out.push(c.clone());
            ControlFlow::Continue(())
        })?;
        out.sort();
        Ok(out)
    }

    /// Balanced, or unbalanced with a nontrivial odd cycle as witness.
    pub fn check_balanced(&self, budget: u64) -> Result<Balance> {
        let filter = CycleFilter {
            odd_only: true,
            nontrivial_only: true,
            max_len: self.vertex_count(),
        };
        let mut witness = None;
        self.search_cycles(filter, budget, |c| {
            witness = Some(c.clone());
            ControlFlow::Break(())
        })?;
        Ok(match witness {
            None => Balance::Balanced,
            Some(witness) => Balance::Unbalanced { witness },
        })
    }

    /// Visits every cycle passing `filter` once, in search order, until
    /// `visit` breaks. Returns whether the visit was cut short.
    pub fn search_cycles(
        &self,
        filter: CycleFilter,
        budget: u64,
        visit: impl FnMut(&HyperCycle) -> ControlFlow<()>,
    ) -> Result<bool> {
        let n = self.vertex_count();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            for a in e.members() {
                incident[self.roster.agent_index(a)].push(i);
            }
        }
        let mut s = Search {
            h: self,
            filter,
            incident,
            budget,
            steps: 0,
            on_path: vec![false; n],
            covered: vec![0; n],
            edge_used: vec![false; self.edges.len()],
            path: Vec::new(),
            path_edges: Vec::new(),
            visit,
        };
        for start in 0..n {
            s.path.push(start);
            s.on_path[start] = true;
            let flow = s.extend(start)?;
            s.on_path[start] = false;
            s.path.pop();
            if flow.is_break() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn all_distinct<T: PartialEq>(xs: &[T]) -> bool {
    xs.iter().enumerate().all(|(i, x)| !xs[..i].contains(x))
}

/// Which cycles a search reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleFilter {
    pub odd_only: bool,
    pub nontrivial_only: bool,
    /// Longest cycle length (number of edges) considered; at least 2.
    pub max_len: usize,
}

impl CycleFilter {
    pub fn all(max_len: usize) -> Self {
        CycleFilter {
            odd_only: false,
            nontrivial_only: false,
            max_len,
        }
    }

    pub fn nontrivial_odd(max_len: usize) -> Self {
        CycleFilter {
            odd_only: true,
            nontrivial_only: true,
            max_len,
        }
    }
}

struct Search<'a, F> {
    h: &'a FirmWorkerHypergraph,
    filter: CycleFilter,
    incident: Vec<Vec<usize>>,
    budget: u64,
    steps: u64,
    on_path: Vec<bool>,
    // Number of path edges containing each vertex.
    covered: Vec<u32>,
    edge_used: Vec<bool>,
    path: Vec<usize>,
    path_edges: Vec<usize>,
    visit: F,
}

impl<F: FnMut(&HyperCycle) -> ControlFlow<()>> Search<'_, F> {
    fn members(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        let r = &self.h.roster;
        self.h.edges[e].members().map(move |a| r.agent_index(a))
    }

    // Path vertices in edge `e`, other than `allowed`.
    fn meets_path_outside(&self, e: usize, allowed: &[usize]) -> bool {
        self.members(e)
            .any(|v| self.on_path[v] && !allowed.contains(&v))
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(Error::BudgetExhausted(self.budget))
        } else {
            Ok(())
        }
    }

    fn extend(&mut self, current: usize) -> Result<ControlFlow<()>> {
        let start = self.path[0];
        let k = self.path_edges.len();
        let nontrivial = self.filter.nontrivial_only;
        let incident = self.incident[current].clone();
        for e in incident {
            if self.edge_used[e] {
                continue;
            }
            // Close the cycle through `e`.
            if k >= 1 && current != start && self.members(e).any(|v| v == start) {
                let len = k + 1;
                let oriented = if len == 2 {
                    self.path_edges[0] < e
                } else {
                    self.path[1] < current
                };
                let fits = len <= self.filter.max_len
                    && (!self.filter.odd_only || len % 2 == 1)
                    && (!nontrivial || !self.meets_path_outside(e, &[current, start]));
                if oriented && fits {
                    self.tick()?;
                    self.path_edges.push(e);
                    let cycle = HyperCycle {
                        vertices: self.path.iter().map(|&v| self.h.roster.agent_at(v)).collect(),
                        edges: self.path_edges.clone(),
                    };
                    self.path_edges.pop();
                    if (self.visit)(&cycle).is_break() {
                        return Ok(ControlFlow::Break(()));
                    }
                }
            }
            // Extend the path through `e` to a fresh vertex.
            if k + 1 >= self.filter.max_len {
                continue;
            }
            if nontrivial && self.meets_path_outside(e, &[current]) {
                continue;
            }
            let candidates: Vec<usize> = self
                .members(e)
                .filter(|&v| v > start && !self.on_path[v])
                .filter(|&v| !nontrivial || self.covered[v] == 0)
                .collect();
            if candidates.is_empty() {
                continue;
            }
            self.edge_used[e] = true;
            self.path_edges.push(e);
            let members: Vec<usize> = self.members(e).collect();
            for &v in &members {
                self.covered[v] += 1;
            }
            let mut flow = ControlFlow::Continue(());
            for v in candidates {
                self.tick()?;
                self.on_path[v] = true;
                self.path.push(v);
                flow = self.extend(v)?;
                self.path.pop();
                self.on_path[v] = false;
                if flow.is_break() {
                    break;
                }
            }
            for &v in &members {
                self.covered[v] -= 1;
            }
            self.path_edges.pop();
            self.edge_used[e] = false;
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// `(j¹, E¹, …, jᵏ, Eᵏ)`: vertex `jⁱ` and `jⁱ⁺¹` both lie in edge `Eⁱ`
/// (indices into the hypergraph's edge list).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HyperCycle {
    pub vertices: Vec<AgentId>,
    pub edges: Vec<usize>,
}

impl HyperCycle {
    pub fn new(vertices: Vec<AgentId>, edges: Vec<usize>) -> Self {
        HyperCycle { vertices, edges }
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The rotation/reflection with the lexicographically smallest vertex
    /// sequence (ties broken by edge sequence).
    pub fn canonical(&self) -> HyperCycle {
        let k = self.edges.len();
        let mut best: Option<HyperCycle> = None;
        for r in 0..k {
            let fwd = HyperCycle {
                vertices: (0..k).map(|i| self.vertices[(r + i) % k]).collect(),
                edges: (0..k).map(|i| self.edges[(r + i) % k]).collect(),
            };
            // Reversed walk from vertex r: r, r-1, ... with edges r-1, r-2, ...
            let rev = HyperCycle {
                vertices: (0..k).map(|i| self.vertices[(r + k - i) % k]).collect(),
                edges: (0..k).map(|i| self.edges[(r + 2 * k - i - 1) % k]).collect(),
            };
            for c in [fwd, rev] {
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
        }
        best.unwrap_or_else(|| self.clone())
    }

    /// `(w1,{f1,w1,w2},w2,…,w1)` style label.
    pub fn label(&self, h: &FirmWorkerHypergraph) -> String {
        let r = h.roster();
        let mut parts = Vec::new();
        for (v, e) in self.vertices.iter().zip(&self.edges) {
            parts.push(r.agent_name(*v).to_string());
            parts.push(h.edge_label(*e));
        }
        if let Some(v) = self.vertices.first() {
            parts.push(r.agent_name(*v).to_string());
        }
        format!("({})", parts.join(","))
    }
}

/// Verdict of [`FirmWorkerHypergraph::check_balanced`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Balance {
    Balanced,
    Unbalanced { witness: HyperCycle },
}

impl Balance {
    pub fn is_balanced(&self) -> bool {
        matches!(self, Balance::Balanced)
    }
}

/// Dense integer matrix with row and column labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<Vec<i64>>,
}

impl IntMatrix {
    pub fn new(rows: Vec<String>, cols: Vec<String>, entries: Vec<Vec<i64>>) -> Result<Self> {
        if entries.len() != rows.len() || entries.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::Precondition(format!(
                "matrix entries do not form a {}x{} grid",
                rows.len(),
                cols.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Matrix whose columns are `columns`, each of length `rows.len()`.
    pub fn from_columns(rows: Vec<String>, cols: Vec<String>, columns: &[Vec<i64>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows.len()) {
            return Err(Error::Precondition("column length mismatch".into()));
        }
        let entries = (0..rows.len())
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        Self::new(rows, cols, entries)
    }

    pub fn identity(n: usize) -> Self {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        IntMatrix::new(labels.clone(), labels, entries).expect("square")
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[String] {
        &self.cols
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r][c]
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        self.entries.iter().map(|r| r[c]).collect()
    }

    pub fn column_sums(&self) -> Vec<i64> {
        (0..self.ncols()).map(|c| self.column(c).iter().sum()).collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<i64>> {
        rows.iter()
            .map(|&r| cols.iter().map(|&c| self.entries[r][c]).collect())
            .collect()
    }
}

/// Convenience for the worker/firm lookups in tests and examples.
pub fn worker(i: usize) -> AgentId {
    AgentId::Worker(WorkerId(i))
}

pub fn firm(i: usize) -> AgentId {
    AgentId::Firm(FirmId(i))
}
