use log::trace;
use serde::{Deserialize, Serialize};

use crate::arith::{dot, RatMatrix, RatVector, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: RatVector,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Linear program over free (sign-unrestricted) variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpProblem {
    pub variables: usize,
    pub constraints: Vec<Constraint>,
    pub objective: RatVector,
    pub sense: Sense,
}

impl LpProblem {
    pub fn new(variables: usize, sense: Sense, objective: RatVector) -> Self {
        assert_eq!(objective.len(), variables);
        LpProblem { variables, constraints: Vec::new(), objective, sense }
    }

    /// Pure feasibility problem (zero objective).
    pub fn feasibility(variables: usize) -> Self {
        Self::new(variables, Sense::Maximize, vec![Rational::zero(); variables])
    }

    pub fn push(&mut self, coeffs: RatVector, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.variables, "constraint length");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn add_eq(&mut self, coeffs: RatVector, rhs: Rational) {
        self.push(coeffs, Relation::Eq, rhs);
    }

    pub fn add_ge(&mut self, coeffs: RatVector, rhs: Rational) {
        self.push(coeffs, Relation::Ge, rhs);
    }

    /// `coeffs·x ≤ rhs`, stored as `−coeffs·x ≥ −rhs`.
    pub fn add_le(&mut self, coeffs: RatVector, rhs: Rational) {
        let neg = coeffs.iter().map(|x| -x).collect();
        self.push(neg, Relation::Ge, -rhs);
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.variables
            && self.constraints.iter().all(|c| {
                let lhs = dot(&c.coeffs, x);
                match c.relation {
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of [`solve`] together with the evidence for it.
///
/// * optimal: `primal` is an optimal point, `dual` satisfies `Aᵀy = c` with
///   `y ≤ 0` on `≥` rows when maximizing (`y ≥ 0` when minimizing), and
///   `b·y = c·x = value`.
/// * infeasible: `dual` is a Farkas vector, `Aᵀy = 0`, `y ≥ 0` on `≥` rows,
///   `b·y > 0`.
/// * unbounded: `primal` is feasible and `ray` is an improving recession
///   direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpCertificate {
    pub status: LpStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primal: Option<RatVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<RatVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray: Option<RatVector>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("certificate rejected: {0}")]
pub struct CertificateError(pub String);

struct Tableau {
    /// `rows × (ncols + 1)`, last column is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Columns at or beyond this index are artificial.
    art0: usize,
    ncols: usize,
    pivots: usize,
    cap: u128,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.t[i][self.ncols]
    }

    /// Pivot on `(r, c)`, also eliminating column `c` from the reduced costs `d`.
    fn pivot(&mut self, r: usize, c: usize, d: &mut [Rational]) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let prow = std::mem::take(&mut self.t[r]);
        let support: Vec<usize> = (0..prow.len()).filter(|&k| !prow[k].is_zero()).collect();
        let eliminate = |row: &mut [Rational]| {
            let f = row[c].clone();
            if !f.is_zero() {
                for &k in &support {
                    row[k] -= &(&f * &prow[k]);
                }
            }
        };
        for row in self.t.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(d);
        self.t[r] = prow;

        let out = self.basis[r];
        self.is_basic[out] = false;
        self.is_basic[c] = true;
        self.basis[r] = c;
        if out >= self.art0 {
            // An artificial that has left the basis is never needed again.
            for row in self.t.iter_mut() {
                row[out] = Rational::zero();
            }
            d[out] = Rational::zero();
        }
        self.pivots += 1;
        assert!(
            (self.pivots as u128) <= self.cap,
            "simplex exceeded its iteration bound; Bland's rule must not cycle"
        );
    }

    /// Reduced costs `c_j − Σ_i c_{B(i)} t_ij` of every column; the last
    /// entry tracks the objective value with its sign flipped.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut d: Vec<Rational> = cost.to_vec();
        d.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for (x, y) in d.iter_mut().zip(&self.t[i]) {
                if !y.is_zero() {
                    *x -= &(&cost[b] * y);
                }
            }
        }
        d
    }

    /// Maximize `cost·w` with Bland's smallest-index rule.
    fn run(&mut self, cost: &[Rational], allowed: usize) -> Outcome {
        let mut d = self.reduced_costs(cost);
        loop {
            let entering = (0..allowed).find(|&j| !self.is_basic[j] && d[j].is_positive());
            let Some(j) = entering else {
                return Outcome::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Outcome::Unbounded(j);
            };
            trace!("pivot #{}: column {} enters, row {} (column {}) leaves", self.pivots + 1, j, r, self.basis[r]);
            self.pivot(r, j, &mut d);
        }
    }

    fn basic_solution(&self) -> RatVector {
        let mut w = vec![Rational::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            w[b] = self.rhs(i).clone();
        }
        w
    }
}

fn binomial_cap(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    // Each phase may visit every basis once, plus the artificial clean-up pivots.
    acc.saturating_mul(2).saturating_add(n as u128 + 16)
}

/// Solve a linear program exactly with the two-phase simplex method.
pub fn solve(p: &LpProblem) -> LpCertificate {
    let nv = p.variables;
    let m = p.constraints.len();
    let nge = p.constraints.iter().filter(|c| c.relation == Relation::Ge).count();
    // A `≥` row with right-hand side ≤ 0 is negated so its slack starts basic;
    // every other row gets an artificial.
    let slack_basic = |c: &Constraint| c.relation == Relation::Ge && !c.rhs.is_positive();
    let nart = p.constraints.iter().filter(|c| !slack_basic(c)).count();
    let slack0 = 2 * nv;
    let art0 = slack0 + nge;
    let ncols = art0 + nart;

    // Standard form over w = (x⁺, x⁻, s, art) ≥ 0 with nonnegative right-hand sides.
    let mut signs = Vec::with_capacity(m);
    let mut a_hat = RatMatrix::zeros(m, ncols);
    let mut b_hat = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = slack0;
    let mut art = art0;
    for (i, c) in p.constraints.iter().enumerate() {
        let s = if slack_basic(c) || c.rhs.is_negative() { -1 } else { 1 };
        let sr = Rational::from(s);
        signs.push(s);
        for (j, a) in c.coeffs.iter().enumerate() {
            a_hat.set(i, j, a * &sr);
            a_hat.set(i, nv + j, -(a * &sr));
        }
        if c.relation == Relation::Ge {
            a_hat.set(i, slack, -sr.clone());
            if slack_basic(c) {
                basis.push(slack);
            }
            slack += 1;
        }
        if !slack_basic(c) {
            a_hat.set(i, art, Rational::one());
            basis.push(art);
            art += 1;
        }
        b_hat.push(&c.rhs * &sr);
    }

    let mut is_basic = vec![false; ncols];
    for &b in &basis {
        is_basic[b] = true;
    }
    let mut tab = Tableau {
        t: (0..m)
            .map(|i| {
                let mut r = a_hat.row(i).to_vec();
                r.push(b_hat[i].clone());
                r
            })
            .collect(),
        basis,
        is_basic,
        art0,
        ncols,
        pivots: 0,
        cap: binomial_cap(ncols, m),
    };

    // Phase 1: maximize −Σ art.
    let mut phase1 = vec![Rational::zero(); ncols];
    for c in phase1.iter_mut().skip(art0) {
        *c = -Rational::one();
    }
    tab.run(&phase1, ncols);
    let infeas: Rational = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= art0)
        .map(|(i, _)| tab.rhs(i).clone())
        .sum();
    if infeas.is_positive() {
        let y_hat = dual_from_basis(&a_hat, &tab.basis, &phase1);
        // ŷ = −y' refutes the standard form; undo the row sign flips.
        let farkas = y_hat.iter().zip(&signs).map(|(y, &s)| -(y * &Rational::from(s))).collect();
        return LpCertificate {
            status: LpStatus::Infeasible,
            value: None,
            primal: None,
            dual: Some(farkas),
            ray: None,
            pivots: tab.pivots,
        };
    }

    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and never change afterwards.
    for i in 0..m {
        if tab.basis[i] >= art0 {
            if let Some(j) = (0..art0).find(|&j| !tab.t[i][j].is_zero() && !tab.is_basic[j]) {
                let mut scratch = vec![Rational::zero(); ncols + 1];
                tab.pivot(i, j, &mut scratch);
            }
        }
    }

    // Phase 2.
    let flip = if p.sense == Sense::Minimize { -Rational::one() } else { Rational::one() };
    let mut cost = vec![Rational::zero(); ncols];
    for j in 0..nv {
        cost[j] = &p.objective[j] * &flip;
        cost[nv + j] = -&cost[j];
    }
    let outcome = tab.run(&cost, art0);
    let w = tab.basic_solution();
    let x: RatVector = (0..nv).map(|j| &w[j] - &w[nv + j]).collect();
    match outcome {
        Outcome::Optimal => {
            let y_hat = dual_from_basis(&a_hat, &tab.basis, &cost);
            let y = y_hat
                .iter()
                .zip(&signs)
                .map(|(y, &s)| y * &Rational::from(s) * &flip)
                .collect();
            LpCertificate {
                status: LpStatus::Optimal,
                value: Some(p.objective_value(&x)),
                primal: Some(x),
                dual: Some(y),
                ray: None,
                pivots: tab.pivots,
            }
        }
        Outcome::Unbounded(j) => {
            let mut d = vec![Rational::zero(); ncols];
            d[j] = Rational::one();
            for (i, &b) in tab.basis.iter().enumerate() {
                d[b] = -&tab.t[i][j];
            }
            let ray = (0..nv).map(|k| &d[k] - &d[nv + k]).collect();
            LpCertificate {
                status: LpStatus::Unbounded,
                value: None,
                primal: Some(x),
                dual: None,
                ray: Some(ray),
                pivots: tab.pivots,
            }
        }
    }
}

/// Simplex multipliers: solve Bᵀy = c_B for the current basis.
fn dual_from_basis(a_hat: &RatMatrix, basis: &[usize], cost: &[Rational]) -> RatVector {
    let b = a_hat.select_columns(basis);
    let c_b: RatVector = basis.iter().map(|&j| cost[j].clone()).collect();
    b.transpose()
        .solve(&c_b)
        .expect("basis dimensions")
        .expect("basis matrix is nonsingular")
}

/// Check a certificate against its problem by exact substitution.
pub fn verify_certificate(p: &LpProblem, cert: &LpCertificate) -> Result<(), CertificateError> {
    let fail = |msg: &str| Err(CertificateError(msg.to_string()));
    let at_y = |y: &[Rational]| -> RatVector {
        (0..p.variables)
            .map(|j| p.constraints.iter().zip(y).map(|(c, yi)| &c.coeffs[j] * yi).sum())
            .collect()
    };
    let b_dot = |y: &[Rational]| -> Rational { p.constraints.iter().zip(y).map(|(c, yi)| &c.rhs * yi).sum() };
    match cert.status {
        LpStatus::Optimal => {
            let (Some(x), Some(y), Some(v)) = (&cert.primal, &cert.dual, &cert.value) else {
                return fail("optimal certificate is missing primal, dual or value");
            };
            if y.len() != p.constraints.len() {
                return fail("dual length");
            }
            if !p.is_feasible_point(x) {
                return fail("primal point violates a constraint");
            }
            if at_y(y) != p.objective {
                return fail("dual does not reproduce the objective");
            }
            for (c, yi) in p.constraints.iter().zip(y) {
                if c.relation == Relation::Ge {
                    let bad = match p.sense {
                        Sense::Maximize => yi.is_positive(),
                        Sense::Minimize => yi.is_negative(),
                    };
                    if bad {
                        return fail("dual sign on an inequality row");
                    }
                }
            }
            if p.objective_value(x) != *v || b_dot(y) != *v {
                return fail("primal and dual objective values differ");
            }
            Ok(())
        }
        LpStatus::Infeasible => {
            let Some(y) = &cert.dual else {
                return fail("infeasibility certificate is missing the Farkas vector");
            };
            if y.len() != p.constraints.len() {
                return fail("Farkas vector length");
            }
            if at_y(y).iter().any(|v| !v.is_zero()) {
                return fail("Farkas combination has nonzero coefficients");
            }
            if p.constraints.iter().zip(y).any(|(c, yi)| c.relation == Relation::Ge && yi.is_negative()) {
                return fail("negative multiplier on an inequality row");
            }
            if !b_dot(y).is_positive() {
                return fail("Farkas combination does not yield 0 ≥ positive");
            }
            Ok(())
        }
        LpStatus::Unbounded => {
            let (Some(x), Some(d)) = (&cert.primal, &cert.ray) else {
                return fail("unbounded certificate is missing point or ray");
            };
            if !p.is_feasible_point(x) {
                return fail("base point infeasible");
            }
            for c in &p.constraints {
                let v = dot(&c.coeffs, d);
                let ok = match c.relation {
                    Relation::Eq => v.is_zero(),
                    Relation::Ge => !v.is_negative(),
                };
                if !ok {
                    return fail("ray leaves the feasible region");
                }
            }
            let gain = p.objective_value(d);
            let improving = match p.sense {
                Sense::Maximize => gain.is_positive(),
                Sense::Minimize => gain.is_negative(),
            };
            if !improving {
                return fail("ray does not improve the objective");
            }
            Ok(())
        }
    }
}
