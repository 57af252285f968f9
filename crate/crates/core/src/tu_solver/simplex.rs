//! Two-phase primal simplex over exact rationals.
//!
//! Solves `min cᵀx  s.t.  Ax = b, x ≥ 0` on a dense tableau with Bland's
//! rule (lowest-index entering column, lowest-index leaving basic variable
//! on ratio ties), so it terminates and is deterministic. Phase one adds one
//! artificial column per row; their final tableau columns hold `B⁻¹`, from
//! which the simplex multipliers `y = c_B B⁻¹` are read.

use num_traits::{Signed, Zero};

use crate::model::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpFailure {
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    /// Multipliers `y` with `Aᵀy ≤ c` and `bᵀy = cᵀx`.
    pub y: Vec<Rational>,
    pub objective: Rational,
    pub pivots: usize,
}

/// Equality-form linear program.
#[derive(Debug, Clone)]
pub struct StandardLp {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    fn reduced_cost(&self, cost: &[Rational], j: usize) -> Rational {
        let mut d = cost[j].clone();
        for (i, &bv) in self.basis.iter().enumerate() {
            if !cost[bv].is_zero() && !self.rows[i][j].is_zero() {
                d -= &cost[bv] * &self.rows[i][j];
            }
        }
        d
    }

    /// Runs Bland's rule over columns `0..allowed` until optimal.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> Result<(), LpFailure> {
        loop {
            let entering = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.reduced_cost(cost, j).is_negative());
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return Err(LpFailure::Unbounded),
            }
        }
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .map(|(&bv, v)| &cost[bv] * v)
            .sum()
    }
}

impl StandardLp {
    pub fn solve(&self) -> Result<LpSolution, LpFailure> {
        let m = self.b.len();
        let n = self.c.len();
        assert!(self.a.len() == m && self.a.iter().all(|r| r.len() == n));

        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        for (i, (row, bi)) in self.a.iter().zip(&self.b).enumerate() {
            let flip = bi.is_negative();
            let mut r: Vec<Rational> = row
                .iter()
                .map(|v| if flip { -v.clone() } else { v.clone() })
                .collect();
            r.extend((0..m).map(|k| {
                if k == i {
                    Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                }
            }));
            rows.push(r);
            rhs.push(if flip { -bi.clone() } else { bi.clone() });
        }
        let mut t = Tableau {
            rows,
            rhs,
            basis: (n..n + m).collect(),
            pivots: 0,
        };

        // Phase one: minimise the sum of artificials.
        let mut phase1 = vec![Rational::zero(); n + m];
        for v in &mut phase1[n..] {
            *v = Rational::from_integer(1.into());
        }
        t.optimize(&phase1, n + m)?;
        if t.objective(&phase1).is_positive() {
            return Err(LpFailure::Infeasible);
        }
        // Drive zero-level artificials out where a real column can replace
        // them; rows where none can are redundant and keep their artificial.
        for r in 0..m {
            if t.basis[r] >= n {
                if let Some(col) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, col);
                }
            }
        }

        // Phase two on the real costs; artificials may no longer enter.
        let mut cost = self.c.clone();
        cost.extend((0..m).map(|_| Rational::zero()));
        t.optimize(&cost, n)?;

        let mut x = vec![Rational::zero(); n];
        for (i, &bv) in t.basis.iter().enumerate() {
            if bv < n {
                x[bv] = t.rhs[i].clone();
            }
        }
        let mut y = vec![Rational::zero(); m];
        for (k, yk) in y.iter_mut().enumerate() {
            let mut v = Rational::zero();
            for (i, &bv) in t.basis.iter().enumerate() {
                if !cost[bv].is_zero() {
                    v += &cost[bv] * &t.rows[i][n + k];
                }
            }
            // Undo the sign flip of rows with negative right-hand side.
            *yk = if self.b[k].is_negative() { -v } else { v };
        }
        let objective = t.objective(&cost);
        Ok(LpSolution {
            x,
            y,
            objective,
            pivots: t.pivots,
        })
    }
}
