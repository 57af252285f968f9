use std::fmt;

/// Index of a firm inside its market (declaration order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FirmId(pub usize);

/// Index of a worker inside its market (declaration order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorkerId(pub usize);

/// A firm or a worker. Firms order before workers, which is also the row
/// order of every incidence matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgentId {
    Firm(FirmId),
    Worker(WorkerId),
}

impl AgentId {
    pub fn is_firm(self) -> bool {
        matches!(self, AgentId::Firm(_))
    }
}

/// Largest worker population a [`WorkerSet`] can index.
pub const MAX_WORKERS: usize = 64;

/// A set of workers stored as a bit mask over worker indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct WorkerSet(u64);

impl WorkerSet {
    pub const EMPTY: WorkerSet = WorkerSet(0);

    pub fn from_bits(bits: u64) -> Self {
        WorkerSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(w: WorkerId) -> Self {
        debug_assert!(w.0 < MAX_WORKERS);
        WorkerSet(1 << w.0)
    }

    /// Every worker with index below `n`.
    pub fn full(n: usize) -> Self {
        if n >= MAX_WORKERS {
            WorkerSet(u64::MAX)
        } else {
            WorkerSet((1u64 << n) - 1)
        }
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, w: WorkerId) -> bool {
        w.0 < MAX_WORKERS && self.0 & (1 << w.0) != 0
    }

    pub fn insert(&mut self, w: WorkerId) {
        self.0 |= 1 << w.0;
    }

    pub fn remove(&mut self, w: WorkerId) {
        self.0 &= !(1 << w.0);
    }

    pub fn is_subset(self, other: WorkerSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: WorkerSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: WorkerSet) -> WorkerSet {
        WorkerSet(self.0 | other.0)
    }

    pub fn intersection(self, other: WorkerSet) -> WorkerSet {
        WorkerSet(self.0 & other.0)
    }

    pub fn difference(self, other: WorkerSet) -> WorkerSet {
        WorkerSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = WorkerId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(WorkerId(i))
        })
    }

    /// All subsets of `self`, starting from the empty set.
    pub fn subsets(self) -> impl Iterator<Item = WorkerSet> {
        let mask = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some((cur.wrapping_sub(mask)) & mask)
            };
            Some(WorkerSet(cur))
        })
    }

    /// Indicator vector over `n` workers.
    pub fn indicator(self, n: usize) -> Vec<i64> {
        (0..n).map(|i| i64::from(self.contains(WorkerId(i)))).collect()
    }
}

impl FromIterator<WorkerId> for WorkerSet {
    fn from_iter<I: IntoIterator<Item = WorkerId>>(iter: I) -> Self {
        let mut s = WorkerSet::EMPTY;
        for w in iter {
            s.insert(w);
        }
        s
    }
}

impl fmt::Debug for WorkerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|w| w.0)).finish()
    }
}

// Sets compare by their sorted member lists, so {w1} < {w1,w2} < {w2}.
impl Ord for WorkerSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for WorkerSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
