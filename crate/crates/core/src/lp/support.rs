use serde::Serialize;

use super::{solve, LpCertificate, LpProblem, LpStatus, Sense};
use crate::arith::{dot, RatMatrix, RatVector, Rational};
use crate::fans::{is_complete, Cone, Fan};
use crate::polytope::{FaceDescriptor, HPolytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SupportLpError {
    #[error("fan is not complete")]
    NotComplete,
}

/// The strictly-convex support function search for a complete simplicial fan.
///
/// Variables are laid out as `[a_1 … a_k | α_σ for each maximal σ | t]`:
/// one offset per ray, one linear functional per maximal cone, and the slack
/// `t ≤ 1` that the objective maximizes. The fan is polytopal iff `t* > 0`.
#[derive(Debug, Clone)]
pub struct SupportLp {
    pub problem: LpProblem,
    pub cones: Vec<Cone>,
    rays: usize,
    dim: usize,
}

/// A feasible point of [`SupportLp`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportSolution {
    pub t: Rational,
    pub offsets: RatVector,
    pub alphas: Vec<(Cone, RatVector)>,
}

pub fn support_function_lp(qfan: &Fan) -> Result<SupportLp, SupportLpError> {
    if !is_complete(qfan) {
        return Err(SupportLpError::NotComplete);
    }
    let k = qfan.rays().len();
    let n = qfan.ambient_dim();
    let cones = qfan.maximal_cones();
    let nv = k + cones.len() * n + 1;
    let t = nv - 1;
    let mut objective = vec![Rational::zero(); nv];
    objective[t] = Rational::one();
    let mut p = LpProblem::new(nv, Sense::Maximize, objective);
    for (s, cone) in cones.iter().enumerate() {
        for i in 0..k {
            let mut row = vec![Rational::zero(); nv];
            for (d, x) in qfan.ray(i).iter().enumerate() {
                row[k + s * n + d] = Rational::from(*x);
            }
            row[i] = -Rational::one();
            if cone.contains_ray(i) {
                p.add_eq(row, Rational::zero());
            } else {
                row[t] = -Rational::one();
                p.add_ge(row, Rational::zero());
            }
        }
    }
    let mut cap = vec![Rational::zero(); nv];
    cap[t] = Rational::one();
    p.add_le(cap, Rational::one());
    Ok(SupportLp { problem: p, cones, rays: k, dim: n })
}

impl SupportLp {
    pub fn t_index(&self) -> usize {
        self.problem.variables - 1
    }

    pub fn solve(&self) -> LpCertificate {
        solve(&self.problem)
    }

    /// Same system with the extra requirement `t ≥ t_min`.
    pub fn with_min_slack(&self, t_min: Rational) -> LpProblem {
        let mut p = self.problem.clone();
        let mut row = vec![Rational::zero(); p.variables];
        row[self.t_index()] = Rational::one();
        p.add_ge(row, t_min);
        p
    }

    /// Decode a primal point of the LP.
    pub fn decode(&self, x: &[Rational]) -> SupportSolution {
        let (k, n) = (self.rays, self.dim);
        SupportSolution {
            t: x[self.t_index()].clone(),
            offsets: x[..k].to_vec(),
            alphas: self
                .cones
                .iter()
                .enumerate()
                .map(|(s, c)| (c.clone(), x[k + s * n..k + (s + 1) * n].to_vec()))
                .collect(),
        }
    }
}

/// Exact minimum of `⟨·, direction⟩` over `poly`, with the face of minimizers.
pub fn minimize_over_polytope(
    poly: &HPolytope,
    direction: &[Rational],
) -> Result<(Rational, FaceDescriptor), PolytopeError> {
    let n = poly.dim;
    if direction.len() != n {
        return Err(PolytopeError::DimensionMismatch { expected: n, got: direction.len() });
    }
    let mut p = LpProblem::new(n, Sense::Minimize, direction.to_vec());
    for (nrm, a) in poly.normals.iter().zip(&poly.offsets) {
        p.add_ge(nrm.clone(), a.clone());
    }
    let cert = solve(&p);
    match cert.status {
        LpStatus::Infeasible => return Err(PolytopeError::Empty),
        LpStatus::Unbounded => return Err(PolytopeError::Unbounded),
        LpStatus::Optimal => {}
    }
    let value = cert.value.expect("optimal value");
    let x = cert.primal.expect("optimal point");

    // An inequality is tight on the whole optimal face iff it cannot be
    // slackened while staying optimal.
    let mut on_face = p.clone();
    on_face.add_eq(direction.to_vec(), value.clone());
    let mut tight_set = Vec::new();
    for (i, (nrm, a)) in poly.normals.iter().zip(&poly.offsets).enumerate() {
        if dot(nrm, &x) != *a {
            continue;
        }
        let mut q = on_face.clone();
        q.objective = nrm.clone();
        q.sense = Sense::Maximize;
        let c = solve(&q);
        if c.status == LpStatus::Optimal && c.value.as_ref() == Some(a) {
            tight_set.push(i);
        }
    }
    let normals = RatMatrix::from_rows(n, tight_set.iter().map(|&i| poly.normals[i].clone()).collect());
    let dim = n - normals.rank();
    Ok((value, FaceDescriptor { tight_set, dim }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_vec;
    use crate::fans::{fan_from_complex, SimplicialComplex};
    use crate::lp::verify_certificate;

    fn square_fan() -> Fan {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]])
            .unwrap()
    }

    fn square() -> HPolytope {
        HPolytope::new(2, vec![rat_vec(&[1, 0]), rat_vec(&[0, 1]), rat_vec(&[-1, 0]), rat_vec(&[0, -1])], rat_vec(&[-1, -1, -1, -1]))
            .unwrap()
    }

    fn substitute(lp: &SupportLp, offsets: &[i64], alphas: &[(Vec<usize>, Vec<i64>)], t: i64) -> bool {
        let mut x = vec![Rational::zero(); lp.problem.variables];
        for (i, a) in offsets.iter().enumerate() {
            x[i] = Rational::from(*a);
        }
        let n = alphas[0].1.len();
        for (cone, alpha) in alphas {
            let s = lp.cones.iter().position(|c| c.ray_ids() == cone.as_slice()).unwrap();
            for (d, v) in alpha.iter().enumerate() {
                x[offsets.len() + s * n + d] = Rational::from(*v);
            }
        }
        x[lp.t_index()] = Rational::from(t);
        lp.problem.is_feasible_point(&x)
    }

    #[test]
    fn square_fan_point_is_feasible() {
        let lp = support_function_lp(&square_fan()).unwrap();
        // Quadrant cone {i, j} gets the α with ⟨α, r⟩ = −1 on both of its rays.
        let alphas = vec![
            (vec![0, 1], vec![-1, -1]),
            (vec![1, 2], vec![1, -1]),
            (vec![2, 3], vec![1, 1]),
            (vec![0, 3], vec![-1, 1]),
        ];
        assert!(substitute(&lp, &[-1, -1, -1, -1], &alphas, 1));
        assert!(!substitute(&lp, &[-1, -1, -1, -1], &alphas, 3));
        let c = lp.solve();
        verify_certificate(&lp.problem, &c).unwrap();
        assert_eq!(c.value, Some(Rational::one()));
    }

    #[test]
    fn cp2_fan_is_polytopal() {
        let f = fan_from_complex(&SimplicialComplex::simplex_boundary(2));
        let lp = support_function_lp(&f).unwrap();
        let alphas = vec![(vec![0, 1], vec![0, 0]), (vec![1, 2], vec![1, 0]), (vec![0, 2], vec![0, 1])];
        assert!(substitute(&lp, &[0, 0, -1], &alphas, 1));
        let c = lp.solve();
        verify_certificate(&lp.problem, &c).unwrap();
        assert!(c.value.unwrap().is_positive());
    }

    #[test]
    fn incomplete_fan_rejected() {
        let f = Fan::new(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap();
        assert_eq!(support_function_lp(&f).unwrap_err(), SupportLpError::NotComplete);
    }

    #[test]
    fn trivial_fan_support() {
        let lp = support_function_lp(&Fan::trivial(0)).unwrap();
        let c = lp.solve();
        assert_eq!(c.value, Some(Rational::one()));
    }

    #[test]
    fn minimize_examples() {
        let (v, f) = minimize_over_polytope(&square(), &rat_vec(&[1, 0])).unwrap();
        assert_eq!(v, Rational::from(-1));
        assert_eq!(f, FaceDescriptor { tight_set: vec![0], dim: 1 });
        let (v, f) = minimize_over_polytope(&square(), &rat_vec(&[1, 1])).unwrap();
        assert_eq!(v, Rational::from(-2));
        assert_eq!(f, FaceDescriptor { tight_set: vec![0, 1], dim: 0 });
        let (v, f) = minimize_over_polytope(&square(), &rat_vec(&[0, 0])).unwrap();
        assert_eq!(v, Rational::zero());
        assert_eq!(f, FaceDescriptor { tight_set: vec![], dim: 2 });
        let point = HPolytope::new(0, vec![], vec![]).unwrap();
        let (v, f) = minimize_over_polytope(&point, &[]).unwrap();
        assert_eq!(v, Rational::zero());
        assert_eq!(f.dim, 0);
    }

    #[test]
    fn minimize_errors() {
        let empty = HPolytope::new(1, vec![rat_vec(&[1]), rat_vec(&[-1])], rat_vec(&[1, 0])).unwrap();
        assert_eq!(minimize_over_polytope(&empty, &rat_vec(&[1])), Err(PolytopeError::Empty));
        let ray = HPolytope::new(1, vec![rat_vec(&[1])], rat_vec(&[0])).unwrap();
        assert_eq!(minimize_over_polytope(&ray, &rat_vec(&[-1])), Err(PolytopeError::Unbounded));
    }
}
