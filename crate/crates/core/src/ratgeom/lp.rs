//! Two-phase primal simplex over exact rationals.
//!
//! Pivoting follows Bland's rule: the entering column is the lowest-index
//! column with a negative reduced cost, and ratio-test ties are broken by the
//! lowest basic-variable index. The solver therefore terminates on every
//! input and returns bit-identical results for identical programs.
//!
//! Programs are stated as *maximize* `c·x` subject to rows `a·x {<=,=,>=} b`
//! and optional per-variable bounds. Internally every program is rewritten
//! into the standard form `A y = b, y >= 0, b >= 0`; an infeasible verdict
//! carries a Farkas multiplier vector for that standard form which
//! [`LinearProgram::certifies_infeasibility`] checks independently.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::rational::{dot, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Per-variable bounds; `None` leaves that side unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bound {
    pub fn free() -> Self {
        Bound::default()
    }

    pub fn nonnegative() -> Self {
        Bound {
            lower: Some(Rational::zero()),
            upper: None,
        }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Bound {
            lower: Some(lower),
            upper: Some(upper),
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| x >= l) && self.upper.as_ref().is_none_or(|u| x <= u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    /// Maximized.
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("objective has {found} coefficients, expected {expected}")]
    ObjectiveArity { expected: usize, found: usize },
    #[error("constraint {row} has {found} coefficients, expected {expected}")]
    ConstraintArity {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{found} variable bounds given for {expected} variables")]
    BoundsArity { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Multipliers `y` over the standard-form rows with `Aᵀy >= 0` and `bᵀy < 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    pub solution: Option<Vec<Rational>>,
    pub objective: Option<Rational>,
    pub farkas: Option<FarkasCertificate>,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == LpStatus::Infeasible
    }
}

impl LinearProgram {
    /// A program over `num_vars` nonnegative variables with a zero objective.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            bounds: vec![Bound::nonnegative(); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(mut self, objective: Vec<Rational>) -> Self {
        self.objective = objective;
        self
    }

    pub fn add_constraint(
        &mut self,
        coefficients: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
    }

    pub fn set_bound(&mut self, var: usize, bound: Bound) {
        self.bounds[var] = bound;
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::BoundsArity {
                expected: n,
                found: self.bounds.len(),
            });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(LpError::ConstraintArity {
                    row,
                    expected: n,
                    found: c.coefficients.len(),
                });
            }
        }
        Ok(())
    }

    /// Exact check that `x` satisfies every row and bound.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && self.bounds.iter().zip(x).all(|(b, v)| b.contains(v))
            && self
                .constraints
                .iter()
                .all(|c| c.relation.holds(&dot(&c.coefficients, x), &c.rhs))
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// Verifies a Farkas certificate against this program's standard form.
    pub fn certifies_infeasibility(&self, cert: &FarkasCertificate) -> bool {
        if self.validate().is_err() {
            return false;
        }
        let sf = StandardForm::build(self);
        if cert.multipliers.len() != sf.rows.len() {
            return false;
        }
        let columns_ok = (0..sf.num_cols).all(|j| {
            let s = sf
                .rows
                .iter()
                .zip(&cert.multipliers)
                .fold(Rational::zero(), |acc, (row, y)| acc + &row[j] * y);
            !s.is_negative()
        });
        columns_ok && dot(&sf.rhs, &cert.multipliers).is_negative()
    }

    pub fn solve(&self) -> Result<LpResult, LpError> {
        lp_solve(self)
    }
}

/// Solves `lp` exactly. See the module docs for the pivoting rule.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpResult, LpError> {
    if lp.objective.len() != lp.bounds.len() {
        return Err(LpError::ObjectiveArity {
            expected: lp.bounds.len(),
            found: lp.objective.len(),
        });
    }
    lp.validate()?;
    let sf = StandardForm::build(lp);
    Ok(sf.solve(lp))
}

#[derive(Debug, Clone)]
enum VarMap {
    /// `x = lower + y`
    Shift(Rational, usize),
    /// `x = upper - y`
    Mirror(Rational, usize),
    /// `x = y⁺ - y⁻`
    Split(usize, usize),
}

/// `min cost·y  s.t.  rows·y = rhs, y >= 0, rhs >= 0`.
struct StandardForm {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Column usable as the initial basic variable of each row (a `<=` slack).
    slack_basis: Vec<Option<usize>>,
    cost: Vec<Rational>,
    num_cols: usize,
    map: Vec<VarMap>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut map = Vec::with_capacity(lp.num_vars());
        let mut structural = 0usize;
        for b in &lp.bounds {
            match (&b.lower, &b.upper) {
                (Some(l), _) => {
                    map.push(VarMap::Shift(l.clone(), structural));
                    structural += 1;
                }
                (None, Some(u)) => {
                    map.push(VarMap::Mirror(u.clone(), structural));
                    structural += 1;
                }
                (None, None) => {
                    map.push(VarMap::Split(structural, structural + 1));
                    structural += 2;
                }
            }
        }

        let mut raw: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
        for c in &lp.constraints {
            let mut row = vec![Rational::zero(); structural];
            let mut rhs = c.rhs.clone();
            for (a, m) in c.coefficients.iter().zip(&map) {
                if a.is_zero() {
                    continue;
                }
                match m {
                    VarMap::Shift(l, col) => {
                        row[*col] += a;
                        rhs -= a * l;
                    }
                    VarMap::Mirror(u, col) => {
                        row[*col] -= a;
                        rhs -= a * u;
                    }
                    VarMap::Split(p, q) => {
                        row[*p] += a;
                        row[*q] -= a;
                    }
                }
            }
            raw.push((row, c.relation, rhs));
        }
        for (b, m) in lp.bounds.iter().zip(&map) {
            if let (VarMap::Shift(l, col), Some(u)) = (m, &b.upper) {
                let mut row = vec![Rational::zero(); structural];
                row[*col] = Rational::one();
                raw.push((row, Relation::Le, u - l));
            }
        }

        let slack_count = raw.iter().filter(|r| r.1 != Relation::Eq).count();
        let num_cols = structural + slack_count;
        let mut rows = Vec::with_capacity(raw.len());
        let mut rhs_out = Vec::with_capacity(raw.len());
        let mut slack_basis = Vec::with_capacity(raw.len());
        let mut next_slack = structural;
        for (mut row, mut rel, mut rhs) in raw {
            if rhs.is_negative() {
                row.iter_mut().for_each(|a| *a = -&*a);
                rhs = -rhs;
                rel = rel.flipped();
            }
            row.resize(num_cols, Rational::zero());
            let basis = match rel {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    next_slack += 1;
                    Some(next_slack - 1)
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    None
                }
                Relation::Eq => None,
            };
            rows.push(row);
            rhs_out.push(rhs);
            slack_basis.push(basis);
        }

        let mut cost = vec![Rational::zero(); num_cols];
        for (c, m) in lp.objective.iter().zip(&map) {
            match m {
                VarMap::Shift(_, col) => cost[*col] = -c,
                VarMap::Mirror(_, col) => cost[*col] = c.clone(),
                VarMap::Split(p, q) => {
                    cost[*p] = -c;
                    cost[*q] = c.clone();
                }
            }
        }

        StandardForm {
            rows,
            rhs: rhs_out,
            slack_basis,
            cost,
            num_cols,
            map,
        }
    }

    fn solve(self, lp: &LinearProgram) -> LpResult {
        let n = self.num_cols;
        let m = self.rows.len();
        let art_rows: Vec<usize> = (0..m).filter(|&i| self.slack_basis[i].is_none()).collect();
        let total = n + art_rows.len();

        let mut rows = self.rows;
        let mut basis = vec![0usize; m];
        for (i, row) in rows.iter_mut().enumerate() {
            row.resize(total, Rational::zero());
            if let Some(s) = self.slack_basis[i] {
                basis[i] = s;
            }
        }
        for (k, &i) in art_rows.iter().enumerate() {
            rows[i][n + k] = Rational::one();
            basis[i] = n + k;
        }
        let mut tab = Tableau {
            rows,
            rhs: self.rhs,
            basis,
            obj: vec![Rational::zero(); total],
            obj_rhs: Rational::zero(),
        };

        if !art_rows.is_empty() {
            for k in 0..art_rows.len() {
                tab.obj[n + k] = Rational::one();
            }
            for &i in &art_rows {
                for j in 0..total {
                    if !tab.rows[i][j].is_zero() {
                        let v = &tab.rows[i][j];
                        tab.obj[j] -= v;
                    }
                }
                tab.obj_rhs -= &tab.rhs[i];
            }
            // Phase one is bounded below by zero.
            let _ = tab.run(total);
            if tab.obj_rhs.is_negative() {
                let multipliers = (0..m)
                    .map(|i| match self.slack_basis[i] {
                        Some(s) => tab.obj[s].clone(),
                        None => {
                            let k = art_rows.iter().position(|&r| r == i).unwrap();
                            &tab.obj[n + k] - Rational::one()
                        }
                    })
                    .collect();
                return LpResult {
                    status: LpStatus::Infeasible,
                    solution: None,
                    objective: None,
                    farkas: Some(FarkasCertificate { multipliers }),
                };
            }
            tab.expel_artificials(n);
        }

        tab.obj = self.cost.clone();
        tab.obj_rhs = Rational::zero();
        for i in 0..tab.rows.len() {
            let cb = self.cost[tab.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..n {
                if !tab.rows[i][j].is_zero() {
                    let delta = &cb * &tab.rows[i][j];
                    tab.obj[j] -= delta;
                }
            }
            tab.obj_rhs -= &cb * &tab.rhs[i];
        }
        if tab.run(n) == Outcome::Unbounded {
            return LpResult {
                status: LpStatus::Unbounded,
                solution: None,
                objective: None,
                farkas: None,
            };
        }

        let mut y = vec![Rational::zero(); n];
        for (i, &b) in tab.basis.iter().enumerate() {
            y[b] = tab.rhs[i].clone();
        }
        let x: Vec<Rational> = self
            .map
            .iter()
            .map(|m| match m {
                VarMap::Shift(l, col) => l + &y[*col],
                VarMap::Mirror(u, col) => u - &y[*col],
                VarMap::Split(p, q) => &y[*p] - &y[*q],
            })
            .collect();
        let objective = lp.objective_value(&x);
        LpResult {
            status: LpStatus::Optimal,
            solution: Some(x),
            objective: Some(objective),
            farkas: None,
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Outcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs of the minimization.
    obj: Vec<Rational>,
    /// Negated current objective value.
    obj_rhs: Rational,
}

impl Tableau {
    /// Bland-rule primal simplex restricted to the first `allowed` columns.
    fn run(&mut self, allowed: usize) -> Outcome {
        loop {
            let Some(col) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((r, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((row, _)) = best else {
                return Outcome::Unbounded;
            };
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            let inv = Rational::one() / &p;
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let support: Vec<usize> = (0..self.rows[r].len())
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            let row = &mut self.rows[i];
            for &j in &support {
                row[j] -= &f * &pivot_row[j];
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= &f * &pivot_rhs;
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &j in &support {
                self.obj[j] -= &f * &pivot_row[j];
            }
            self.obj_rhs -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// After a feasible phase one, pivots zero-valued artificials out of the
    /// basis and drops rows that turn out to be redundant.
    fn expel_artificials(&mut self, n: usize) {
        let mut redundant = Vec::new();
        for i in 0..self.rows.len() {
            if self.basis[i] < n {
                continue;
            }
            match (0..n).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => self.pivot(i, j),
                None => redundant.push(i),
            }
        }
        for &i in redundant.iter().rev() {
            self.rows.remove(i);
            self.rhs.remove(i);
            self.basis.remove(i);
        }
        for row in &mut self.rows {
            row.truncate(n);
        }
        self.obj.truncate(n);
    }
}
