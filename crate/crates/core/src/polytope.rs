//! Polytopes in half-space form, their vertices, faces and normal fans.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{dot, primitive_integer, RatMatrix, RatVector, Rational};
use crate::fans::{Cone, Fan};
use crate::lp::{minimize_over_polytope, solve, LpProblem, LpStatus, Sense};

/// P = {α : ⟨α, normals_i⟩ ≥ offsets_i}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPolytope {
    pub dim: usize,
    pub normals: Vec<RatVector>,
    pub offsets: Vec<Rational>,
}

/// A face given by the inequalities tight on all of it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceDescriptor {
    pub tight_set: Vec<usize>,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolytopeError {
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polytope is empty")]
    Empty,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("vertex system for cone {0:?} is singular")]
    SingularVertexSystem(Vec<usize>),
    #[error("vertex {0:?} lies on more facets than the dimension; polytope is not simple")]
    NotSimple(RatVector),
    #[error("normal vector too large for 64-bit rays")]
    Overflow,
}

impl HPolytope {
    pub fn new(dim: usize, normals: Vec<RatVector>, offsets: Vec<Rational>) -> Result<Self, PolytopeError> {
        if normals.len() != offsets.len() {
            return Err(PolytopeError::DimensionMismatch { expected: normals.len(), got: offsets.len() });
        }
        if let Some(bad) = normals.iter().find(|v| v.len() != dim) {
            return Err(PolytopeError::DimensionMismatch { expected: dim, got: bad.len() });
        }
        Ok(HPolytope { dim, normals, offsets })
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// Value of each inequality at `x`: ⟨x, n_i⟩ − a_i.
    pub fn slacks(&self, x: &[Rational]) -> Vec<Rational> {
        self.normals.iter().zip(&self.offsets).map(|(n, a)| dot(n, x) - a).collect()
    }

    /// Translate by c: a_i ↦ a_i + ⟨c, n_i⟩.
    pub fn translate(&self, c: &[Rational]) -> HPolytope {
        let offsets = self.normals.iter().zip(&self.offsets).map(|(n, a)| a + dot(n, c)).collect();
        HPolytope { dim: self.dim, normals: self.normals.clone(), offsets }
    }

    fn lp(&self, sense: Sense, objective: RatVector) -> LpProblem {
        let mut p = LpProblem::new(self.dim, sense, objective);
        for (n, a) in self.normals.iter().zip(&self.offsets) {
            p.add_ge(n.clone(), a.clone());
        }
        p
    }

    /// Nonempty, bounded and full-dimensional, decided by exact LPs.
    pub fn check_full_polytope(&self) -> Result<(), PolytopeError> {
        let n = self.dim;
        // Interior slack s: ⟨α, n_i⟩ − s ≥ a_i, s ≤ 1, maximize s.
        let mut obj = vec![Rational::zero(); n + 1];
        obj[n] = Rational::one();
        let mut p = LpProblem::new(n + 1, Sense::Maximize, obj.clone());
        for (nrm, a) in self.normals.iter().zip(&self.offsets) {
            let mut row = nrm.clone();
            row.push(-Rational::one());
            p.add_ge(row, a.clone());
        }
        p.add_le(obj, Rational::one());
        let c = solve(&p);
        match c.status {
            LpStatus::Infeasible => return Err(PolytopeError::Empty),
            LpStatus::Unbounded => unreachable!("slack is capped"),
            LpStatus::Optimal => {}
        }
        let s = c.value.expect("optimal");
        if s.is_negative() {
            return Err(PolytopeError::Empty);
        }
        for d in 0..n {
            for sign in [1, -1] {
                let mut obj = vec![Rational::zero(); n];
                obj[d] = Rational::from(sign);
                if solve(&self.lp(Sense::Maximize, obj)).status == LpStatus::Unbounded {
                    return Err(PolytopeError::Unbounded);
                }
            }
        }
        if n > 0 && s.is_zero() {
            return Err(PolytopeError::NotFullDimensional);
        }
        Ok(())
    }
}

/// {α : ⟨α, ray_i⟩ ≥ a_i} for the rays of `qfan`.
pub fn polytope_from_support(qfan: &Fan, a: &[Rational]) -> Result<HPolytope, PolytopeError> {
    if a.len() != qfan.rays().len() {
        return Err(PolytopeError::DimensionMismatch { expected: qfan.rays().len(), got: a.len() });
    }
    let normals = (0..qfan.rays().len()).map(|i| qfan.ray_rat(i)).collect();
    HPolytope::new(qfan.ambient_dim(), normals, a.to_vec())
}

/// Vertex α_σ for each maximal cone σ, solving ⟨α_σ, n_i⟩ = a_i for i ∈ σ.
/// The inequalities of `poly` must be indexed like the rays of `qfan`.
pub fn vertices(poly: &HPolytope, qfan: &Fan) -> Result<Vec<(Cone, RatVector)>, PolytopeError> {
    let n = poly.dim;
    qfan.maximal_cones()
        .into_iter()
        .map(|c| {
            let m = RatMatrix::from_rows(n, c.ray_ids().iter().map(|&i| poly.normals[i].clone()).collect());
            let rhs: RatVector = c.ray_ids().iter().map(|&i| poly.offsets[i].clone()).collect();
            if m.rows() != n || m.rank() != n {
                return Err(PolytopeError::SingularVertexSystem(c.ray_ids().to_vec()));
            }
            let v = m.solve(&rhs).expect("square system").expect("nonsingular");
            Ok((c, v))
        })
        .collect()
}

/// The face of `poly` on which `⟨·, v⟩` is minimal.
pub fn min_face(poly: &HPolytope, v: &[Rational]) -> Result<FaceDescriptor, PolytopeError> {
    minimize_over_polytope(poly, v).map(|(_, f)| f)
}

/// Vertices of a bounded polytope with their full tight sets, by solving
/// every square subsystem. Desk-scale only.
pub fn enumerate_vertices(poly: &HPolytope) -> Vec<(RatVector, Vec<usize>)> {
    let n = poly.dim;
    let k = poly.len();
    let mut out: Vec<(RatVector, Vec<usize>)> = Vec::new();
    if n == 0 {
        if poly.offsets.iter().all(|a| !a.is_positive()) {
            let tight = (0..k).filter(|&i| poly.offsets[i].is_zero()).collect();
            out.push((Vec::new(), tight));
        }
        return out;
    }
    let mut subset: Vec<usize> = (0..n).collect();
    if k < n {
        return out;
    }
    loop {
        let m = RatMatrix::from_rows(n, subset.iter().map(|&i| poly.normals[i].clone()).collect());
        if m.rank() == n {
            let rhs: RatVector = subset.iter().map(|&i| poly.offsets[i].clone()).collect();
            let x = m.solve(&rhs).expect("square").expect("nonsingular");
            let slacks = poly.slacks(&x);
            if slacks.iter().all(|s| !s.is_negative()) && !out.iter().any(|(v, _)| *v == x) {
                let tight = (0..k).filter(|&i| slacks[i].is_zero()).collect();
                out.push((x, tight));
            }
        }
        // Next n-subset in lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] != i + k - n {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..n {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Inequalities that cut out a facet of a full-dimensional polytope.
fn facet_inequalities(poly: &HPolytope, verts: &[(RatVector, Vec<usize>)]) -> Vec<bool> {
    let n = poly.dim;
    (0..poly.len())
        .map(|i| {
            let on: Vec<&RatVector> = verts.iter().filter(|(_, t)| t.contains(&i)).map(|(v, _)| v).collect();
            let Some(base) = on.first() else { return false };
            let diffs = on[1..]
                .iter()
                .map(|v| v.iter().zip(base.iter()).map(|(x, y)| x - y).collect())
                .collect();
            RatMatrix::from_rows(n, diffs).rank() + 1 == n
        })
        .collect()
}

/// Inner normal fan of a simple, full-dimensional polytope. Ray `j` of the
/// result is the primitive normal of the `j`-th facet-defining inequality.
pub fn normal_fan(poly: &HPolytope) -> Result<Fan, PolytopeError> {
    normal_fan_with_map(poly).map(|(f, _)| f)
}

/// As [`normal_fan`], also returning the ray of each inequality (`None`
/// for inequalities that do not define a facet).
pub fn normal_fan_with_map(poly: &HPolytope) -> Result<(Fan, Vec<Option<usize>>), PolytopeError> {
    let n = poly.dim;
    if n == 0 {
        if poly.offsets.iter().any(Rational::is_positive) {
            return Err(PolytopeError::Empty);
        }
        return Ok((Fan::trivial(0), vec![None; poly.len()]));
    }
    poly.check_full_polytope()?;
    let verts = enumerate_vertices(poly);
    let facets = facet_inequalities(poly, &verts);

    let mut rays: Vec<Vec<i64>> = Vec::new();
    let mut ray_of = vec![None; poly.len()];
    let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for i in (0..poly.len()).filter(|&i| facets[i]) {
        let p = primitive_integer(&poly.normals[i])
            .expect("facet normal is nonzero")
            .into_iter()
            .map(|x| x.to_i64())
            .collect::<Option<Vec<i64>>>()
            .ok_or(PolytopeError::Overflow)?;
        let id = *index.entry(p.clone()).or_insert_with(|| {
            rays.push(p);
            rays.len() - 1
        });
        ray_of[i] = Some(id);
    }
    let mut cones = Vec::with_capacity(verts.len());
    for (v, tight) in &verts {
        let mut ids: Vec<usize> = tight.iter().filter_map(|&i| ray_of[i]).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != n || tight.iter().filter(|&&i| ray_of[i].is_some()).count() != n {
            return Err(PolytopeError::NotSimple(v.clone()));
        }
        cones.push(ids);
    }
    let fan = Fan::new(n, rays, cones).map_err(|_| PolytopeError::NotSimple(Vec::new()))?;
    Ok((fan, ray_of))
}

/// Outcome of comparing a polytope's normal fan with a given fan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalityReport {
    pub normal: bool,
    pub diagnostics: Vec<String>,
}

pub fn normality_report(poly: &HPolytope, qfan: &Fan) -> NormalityReport {
    let mut diagnostics = Vec::new();
    match normal_fan_with_map(poly) {
        Err(e) => diagnostics.push(format!("normal fan unavailable: {e}")),
        Ok((fan, ray_of)) => {
            for (i, r) in ray_of.iter().enumerate() {
                if r.is_none() {
                    diagnostics.push(format!(
                        "inequality {i} with normal {:?} is redundant (never defines a facet)",
                        poly.normals[i]
                    ));
                }
            }
            if !fan.same_as(qfan) {
                diagnostics.push(format!(
                    "normal fan has {} rays and {} maximal cones; target has {} rays and {} maximal cones, cones differ",
                    fan.rays().len(),
                    fan.maximal_cones().len(),
                    qfan.rays().len(),
                    qfan.maximal_cones().len()
                ));
            }
        }
    }
    NormalityReport { normal: diagnostics.is_empty(), diagnostics }
}

/// The inner normal fan of `poly` coincides with `qfan`.
pub fn is_normal_to(poly: &HPolytope, qfan: &Fan) -> bool {
    normality_report(poly, qfan).normal
}

/// Exact membership.
pub fn contains(poly: &HPolytope, x: &[Rational]) -> bool {
    x.len() == poly.dim && poly.slacks(x).iter().all(|s| !s.is_negative())
}

/// Membership of a float point up to `tol`: ⟨x, n_i⟩ ≥ a_i − tol.
pub fn contains_approx(poly: &HPolytope, x: &[f64], tol: f64) -> bool {
    membership_violation(poly, x) <= tol
}

/// max_i (a_i − ⟨x, n_i⟩)⁺ for a float point.
pub fn membership_violation(poly: &HPolytope, x: &[f64]) -> f64 {
    assert_eq!(x.len(), poly.dim);
    poly.normals
        .iter()
        .zip(&poly.offsets)
        .map(|(n, a)| {
            let v: f64 = n.iter().zip(x).map(|(ni, xi)| ni.to_f64() * xi).sum();
            (a.to_f64() - v).max(0.0)
        })
        .fold(0.0, f64::max)
}

/// JSON document form: `{"dim", "normals", "offsets", "vertices"?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeDoc {
    pub dim: usize,
    pub normals: Vec<RatVector>,
    pub offsets: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<RatVector>>,
}

impl PolytopeDoc {
    pub fn from_polytope(p: &HPolytope, vertices: Option<Vec<RatVector>>) -> Self {
        PolytopeDoc { dim: p.dim, normals: p.normals.clone(), offsets: p.offsets.clone(), vertices }
    }

    pub fn polytope(&self) -> Result<HPolytope, PolytopeError> {
        HPolytope::new(self.dim, self.normals.clone(), self.offsets.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_vec;
    use crate::fans::{fan_from_complex, SimplicialComplex};

    fn square_fan() -> Fan {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]])
            .unwrap()
    }

    fn cp2() -> Fan {
        fan_from_complex(&SimplicialComplex::simplex_boundary(2))
    }

    #[test]
    fn from_support_examples() {
        let p = polytope_from_support(&square_fan(), &rat_vec(&[-1, -1, -1, -1])).unwrap();
        assert!(contains(&p, &rat_vec(&[1, -1])));
        assert!(!contains(&p, &rat_vec(&[2, 0])));
        let pt = polytope_from_support(&Fan::trivial(0), &[]).unwrap();
        assert_eq!(pt.dim, 0);
        assert!(contains(&pt, &[]));
        let tri = polytope_from_support(&cp2(), &rat_vec(&[0, 0, -1])).unwrap();
        assert_eq!(tri.normals[2], rat_vec(&[-1, -1]));
        assert!(polytope_from_support(&cp2(), &rat_vec(&[0])).is_err());
    }

    #[test]
    fn vertex_examples() {
        let p = polytope_from_support(&square_fan(), &rat_vec(&[-1, -1, -1, -1])).unwrap();
        let vs: Vec<RatVector> = vertices(&p, &square_fan()).unwrap().into_iter().map(|(_, v)| v).collect();
        assert_eq!(vs, vec![rat_vec(&[-1, -1]), rat_vec(&[-1, 1]), rat_vec(&[1, -1]), rat_vec(&[1, 1])]);
        let tri = polytope_from_support(&cp2(), &rat_vec(&[0, 0, -1])).unwrap();
        let mut vs: Vec<RatVector> = vertices(&tri, &cp2()).unwrap().into_iter().map(|(_, v)| v).collect();
        vs.sort();
        assert_eq!(vs, vec![rat_vec(&[0, 0]), rat_vec(&[0, 1]), rat_vec(&[1, 0])]);
        let pt = HPolytope::new(0, vec![], vec![]).unwrap();
        assert_eq!(vertices(&pt, &Fan::trivial(0)).unwrap(), vec![(Cone::zero(), vec![])]);
    }

    #[test]
    fn min_face_examples() {
        let p = polytope_from_support(&square_fan(), &rat_vec(&[-1, -1, -1, -1])).unwrap();
        assert_eq!(min_face(&p, &rat_vec(&[1, 0])).unwrap().tight_set, vec![0]);
        assert_eq!(min_face(&p, &rat_vec(&[0, 0])).unwrap().tight_set, Vec::<usize>::new());
        let f = min_face(&p, &rat_vec(&[2, 1])).unwrap();
        assert_eq!(f, FaceDescriptor { tight_set: vec![0, 1], dim: 0 });
    }

    #[test]
    fn normal_fan_examples() {
        let p = polytope_from_support(&square_fan(), &rat_vec(&[-1, -1, -1, -1])).unwrap();
        assert!(normal_fan(&p).unwrap().same_as(&square_fan()));
        let tri = polytope_from_support(&cp2(), &rat_vec(&[0, 0, -1])).unwrap();
        assert!(normal_fan(&tri).unwrap().same_as(&cp2()));
        let pt = HPolytope::new(0, vec![], vec![]).unwrap();
        assert_eq!(normal_fan(&pt).unwrap(), Fan::trivial(0));
    }

    #[test]
    fn normal_fan_errors() {
        let ray = HPolytope::new(1, vec![rat_vec(&[1])], rat_vec(&[0])).unwrap();
        assert_eq!(normal_fan(&ray), Err(PolytopeError::Unbounded));
        let empty = HPolytope::new(1, vec![rat_vec(&[1]), rat_vec(&[-1])], rat_vec(&[1, 0])).unwrap();
        assert_eq!(normal_fan(&empty), Err(PolytopeError::Empty));
        let flat = HPolytope::new(1, vec![rat_vec(&[1]), rat_vec(&[-1])], rat_vec(&[0, 0])).unwrap();
        assert_eq!(normal_fan(&flat), Err(PolytopeError::NotFullDimensional));
        // A square pyramid apex lies on four facets.
        let pyramid = HPolytope::new(
            3,
            vec![rat_vec(&[0, 0, 1]), rat_vec(&[1, 0, -1]), rat_vec(&[-1, 0, -1]), rat_vec(&[0, 1, -1]), rat_vec(&[0, -1, -1])],
            rat_vec(&[0, -1, -1, -1, -1]),
        )
        .unwrap();
        assert!(matches!(normal_fan(&pyramid), Err(PolytopeError::NotSimple(_))));
    }

    #[test]
    fn normality_verdicts() {
        let p = polytope_from_support(&square_fan(), &rat_vec(&[-1, -1, -1, -1])).unwrap();
        assert!(is_normal_to(&p, &square_fan()));
        assert!(!is_normal_to(&p, &cp2()));
        let pt = HPolytope::new(0, vec![], vec![]).unwrap();
        assert!(is_normal_to(&pt, &Fan::trivial(0)));
        // Redundant fifth inequality x ≥ −5 is never tight.
        let mut red = p.clone();
        red.normals.push(rat_vec(&[1, 0]));
        red.offsets.push(Rational::from(-5));
        let r = normality_report(&red, &square_fan());
        assert!(!r.normal);
        assert!(r.diagnostics.iter().any(|d| d.contains("inequality 4")));
    }

    #[test]
    fn float_membership() {
        let p = polytope_from_support(&square_fan(), &rat_vec(&[-1, -1, -1, -1])).unwrap();
        assert!(contains_approx(&p, &[0.0, 0.0], 1e-9));
        assert!(!contains_approx(&p, &[2.0, 0.0], 1e-9));
        assert!(contains_approx(&p, &[1.0 + 1e-12, 0.0], 1e-9));
    }

    #[test]
    fn json_doc() {
        let p = polytope_from_support(&cp2(), &rat_vec(&[0, 0, -1])).unwrap();
        let doc = PolytopeDoc::from_polytope(&p, None);
        let j = serde_json::to_string(&doc).unwrap();
        assert_eq!(j, r#"{"dim":2,"normals":[["1","0"],["0","1"],["-1","-1"]],"offsets":["0","0","-1"]}"#);
        let back: PolytopeDoc = serde_json::from_str(&j).unwrap();
        assert_eq!(back.polytope().unwrap(), p);
    }
}
