use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimplicialComplex;
use crate::arith::{elementary_divisors, primitive_integer, RatMatrix, RatVector, Rational};
use crate::lp::{self, LpProblem, LpStatus};

/// A cone of a fan, named by the sorted indices of its generating rays.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(mut ray_ids: Vec<usize>) -> Self {
        ray_ids.sort_unstable();
        ray_ids.dedup();
        Cone(ray_ids)
    }

    pub fn zero() -> Self {
        Cone(Vec::new())
    }

    pub fn ray_ids(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains_ray(&self, r: usize) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.0.iter().all(|r| other.contains_ray(*r))
    }

    /// All faces of a simplicial cone: every subset of its rays.
    pub fn faces(&self) -> Vec<Cone> {
        let k = self.0.len();
        (0u64..(1u64 << k))
            .map(|mask| Cone((0..k).filter(|i| mask >> i & 1 == 1).map(|i| self.0[i]).collect()))
            .collect()
    }
}

/// Simplicial fan in ℝⁿ with primitive integer rays. The cone list is closed
/// under taking faces, sorted by (dimension, rays), and contains the zero cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FanSpec", into = "FanSpec")]
pub struct Fan {
    ambient_dim: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Cone>,
}

/// On-disk form: `{"ambient_dim": n, "rays": [[ints]], "cones": [[ray indices]]}`.
/// Only maximal cones need to be listed; faces are implied.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FanSpec {
    pub ambient_dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FanError {
    #[error("ray {index} has length {got}, expected {expected}")]
    RayLength { index: usize, got: usize, expected: usize },
    #[error("ray {0} is zero")]
    ZeroRay(usize),
    #[error("ray {0} is not primitive")]
    NotPrimitive(usize),
    #[error("rays {0} and {1} coincide")]
    DuplicateRay(usize, usize),
    #[error("cone {cone:?} references a missing ray")]
    RayOutOfRange { cone: Vec<usize> },
    #[error("cone {0:?} has linearly dependent generators")]
    NotSimplicial(Vec<usize>),
    #[error("integer overflow while primitivizing a ray")]
    Overflow,
}

/// Reason a collection of cones fails to be a (simplicial) fan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FanViolation {
    #[error("image of cone {cone:?} contains a line")]
    NotStronglyConvex { cone: Vec<usize> },
    #[error("rays {first} and {second} project to the same ray")]
    RayCollision { first: usize, second: usize },
    #[error("image of cone {cone:?} is not simplicial")]
    NotSimplicial { cone: Vec<usize> },
    #[error("images of cones {first:?} and {second:?} do not meet in a common face")]
    ImproperIntersection { first: Vec<usize>, second: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProjectError {
    #[error("quotient map has {got} columns, fan lives in dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("quotient map does not have full row rank")]
    RankDeficient,
    #[error("projected ray does not fit in 64-bit integers")]
    Overflow,
    #[error("not a fan: {0}")]
    NotAFan(FanViolation),
}

/// Result of pushing a fan forward along a linear map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub fan: Fan,
    /// For each source ray, the index of its image ray, or `None` when the
    /// source ray lies in the kernel.
    pub ray_image: Vec<Option<usize>>,
    /// `q(u) = scale · ray` for each source ray with a nonzero image.
    pub ray_scale: Vec<Option<Rational>>,
}

fn to_i64(v: Vec<BigInt>) -> Option<Vec<i64>> {
    v.into_iter().map(|x| x.to_i64()).collect()
}

impl Fan {
    /// Validates rays, closes `cones` under faces and checks simpliciality.
    pub fn new(ambient_dim: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != ambient_dim {
                return Err(FanError::RayLength { index: i, got: r.len(), expected: ambient_dim });
            }
            if r.iter().all(|&x| x == 0) {
                return Err(FanError::ZeroRay(i));
            }
            let g = r.iter().fold(0i64, |acc, &x| num_integer::gcd(acc, x));
            if g != 1 {
                return Err(FanError::NotPrimitive(i));
            }
            if let Some(j) = rays[..i].iter().position(|s| s == r) {
                return Err(FanError::DuplicateRay(j, i));
            }
        }
        let mut all = BTreeSet::new();
        all.insert(Cone::zero());
        for c in cones {
            if c.iter().any(|&r| r >= rays.len()) {
                return Err(FanError::RayOutOfRange { cone: c });
            }
            for f in Cone::new(c).faces() {
                all.insert(f);
            }
        }
        let mut cones: Vec<Cone> = all.into_iter().collect();
        cones.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let fan = Fan { ambient_dim, rays, cones };
        for c in &fan.cones {
            if fan.generator_matrix(c).rank() != c.len() {
                return Err(FanError::NotSimplicial(c.ray_ids().to_vec()));
            }
        }
        Ok(fan)
    }

    /// The fan {0} in ℝⁿ.
    pub fn trivial(ambient_dim: usize) -> Self {
        Fan { ambient_dim, rays: Vec::new(), cones: vec![Cone::zero()] }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn ray_rat(&self, i: usize) -> RatVector {
        self.rays[i].iter().map(|&x| Rational::from(x)).collect()
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn contains_cone(&self, c: &Cone) -> bool {
        self.cones.binary_search_by(|x| x.len().cmp(&c.len()).then_with(|| x.cmp(c))).is_ok()
    }

    pub fn maximal_cones(&self) -> Vec<Cone> {
        self.cones
            .iter()
            .filter(|c| !self.cones.iter().any(|d| d.len() > c.len() && c.is_face_of(d)))
            .cloned()
            .collect()
    }

    /// Rows are the generators of `c`.
    pub fn generator_matrix(&self, c: &Cone) -> RatMatrix {
        RatMatrix::from_rows(self.ambient_dim, c.ray_ids().iter().map(|&r| self.ray_rat(r)).collect())
    }

    /// Exact membership of `x` in the cone `c`.
    pub fn cone_contains(&self, c: &Cone, x: &[Rational]) -> bool {
        let g = self.generator_matrix(c).transpose();
        match g.solve(x) {
            Ok(Some(lambda)) => {
                // Generators are independent, so the coefficients are unique.
                lambda.iter().all(|l| !l.is_negative())
            }
            _ => false,
        }
    }

    /// Smallest cone whose relative interior contains `x`, if any.
    pub fn carrier(&self, x: &[Rational]) -> Option<Cone> {
        for c in self.maximal_cones() {
            let g = self.generator_matrix(&c).transpose();
            if let Ok(Some(lambda)) = g.solve(x) {
                if lambda.iter().all(|l| !l.is_negative()) {
                    let support = c
                        .ray_ids()
                        .iter()
                        .zip(&lambda)
                        .filter(|(_, l)| l.is_positive())
                        .map(|(&r, _)| r)
                        .collect();
                    return Some(Cone::new(support));
                }
            }
        }
        None
    }

    /// Relabel rays: ray `i` becomes ray `perm[i]`.
    pub fn relabel_rays(&self, perm: &[usize]) -> Fan {
        let mut rays = vec![Vec::new(); self.rays.len()];
        for (i, r) in self.rays.iter().enumerate() {
            rays[perm[i]] = r.clone();
        }
        let cones = self
            .maximal_cones()
            .iter()
            .map(|c| c.ray_ids().iter().map(|&r| perm[r]).collect())
            .collect();
        Fan::new(self.ambient_dim, rays, cones).expect("relabeling preserves validity")
    }

    /// Same fan up to ray order: equal primitive ray sets and cone collections.
    pub fn same_as(&self, other: &Fan) -> bool {
        if self.ambient_dim != other.ambient_dim || self.rays.len() != other.rays.len() {
            return false;
        }
        let index: BTreeMap<&Vec<i64>, usize> = other.rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let Some(map) = self.rays.iter().map(|r| index.get(r).copied()).collect::<Option<Vec<_>>>() else {
            return false;
        };
        let mine: BTreeSet<Cone> = self
            .cones
            .iter()
            .map(|c| Cone::new(c.ray_ids().iter().map(|&r| map[r]).collect()))
            .collect();
        let theirs: BTreeSet<Cone> = other.cones.iter().cloned().collect();
        mine == theirs
    }
}

impl TryFrom<FanSpec> for Fan {
    type Error = FanError;
    fn try_from(spec: FanSpec) -> Result<Self, Self::Error> {
        Fan::new(spec.ambient_dim, spec.rays, spec.cones)
    }
}

impl From<Fan> for FanSpec {
    fn from(f: Fan) -> Self {
        let cones = f.maximal_cones().into_iter().map(|c| c.0).collect();
        FanSpec { ambient_dim: f.ambient_dim, rays: f.rays, cones }
    }
}

/// Ray order used by [`fan_from_complex`]: vertices 1, …, m that occur in Σ,
/// followed by 0 when it occurs.
pub fn complex_ray_vertices(sigma: &SimplicialComplex) -> Vec<usize> {
    let mut v: Vec<usize> = sigma.vertices().into_iter().filter(|&i| i != 0).collect();
    if !sigma.is_indispensable(0) {
        v.push(0);
    }
    v
}

/// The fan {pos(e_i | i ∈ I) | I ∈ Σ} in ℝ^m, with e_0 = −e_1 − ⋯ − e_m.
pub fn fan_from_complex(sigma: &SimplicialComplex) -> Fan {
    let m = sigma.m();
    let verts = complex_ray_vertices(sigma);
    let rays = verts
        .iter()
        .map(|&v| {
            if v == 0 {
                vec![-1; m]
            } else {
                (1..=m).map(|j| i64::from(j == v)).collect()
            }
        })
        .collect();
    let pos: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let cones = sigma.faces().map(|f| f.iter().map(|v| pos[v]).collect()).collect();
    Fan::new(m, rays, cones).expect("proper subsets of {e_0, …, e_m} are independent")
}

/// Every cone's generators extend to a ℤ-basis (all elementary divisors 1).
pub fn is_nonsingular(fan: &Fan) -> bool {
    fan.maximal_cones().iter().all(|c| {
        if c.is_empty() {
            return true;
        }
        let rows: Vec<Vec<BigInt>> = c.ray_ids().iter().map(|&r| fan.ray(r).iter().map(|&x| BigInt::from(x)).collect()).collect();
        let d = elementary_divisors(&rows);
        d.len() == c.len() && d.iter().all(|x| x.is_one())
    })
}

/// Completeness by the wall criterion: pure of full dimension, every wall in
/// exactly two maximal cones, maximal cones connected through walls.
pub fn is_complete(fan: &Fan) -> bool {
    let n = fan.ambient_dim;
    if n == 0 {
        return true;
    }
    let maximal = fan.maximal_cones();
    if maximal.is_empty() || maximal.iter().any(|c| c.len() != n) {
        return false;
    }
    let mut walls: BTreeMap<Cone, Vec<usize>> = BTreeMap::new();
    for (k, c) in maximal.iter().enumerate() {
        for drop in 0..n {
            let wall = Cone(c.ray_ids().iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &r)| r).collect());
            walls.entry(wall).or_default().push(k);
        }
    }
    if walls.values().any(|owners| owners.len() != 2) {
        return false;
    }
    let mut adj = vec![Vec::new(); maximal.len()];
    for owners in walls.values() {
        adj[owners[0]].push(owners[1]);
        adj[owners[1]].push(owners[0]);
    }
    let mut seen = vec![false; maximal.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(k) = queue.pop_front() {
        for &j in &adj[k] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Randomized cross-check of completeness: every sampled integer point must
/// lie in some cone. Only ever refutes completeness.
pub fn covers_sampled_points(fan: &Fan, count: usize, seed: u64) -> bool {
    let n = fan.ambient_dim;
    if n == 0 {
        return true;
    }
    let maximal = fan.maximal_cones();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).all(|_| {
        let x: RatVector = (0..n).map(|_| Rational::from(rng.random_range(-1000i64..=1000))).collect();
        maximal.iter().any(|c| fan.cone_contains(c, &x))
    })
}

/// All faces of a simplicial cone.
pub fn faces_of(c: &Cone, _fan: &Fan) -> Vec<Cone> {
    c.faces()
}

/// Image of `fan` under the linear map `q` (rows = output coordinates),
/// validated to be a simplicial fan.
pub fn project_fan(fan: &Fan, q: &RatMatrix) -> Result<Projection, ProjectError> {
    if q.cols() != fan.ambient_dim {
        return Err(ProjectError::DimensionMismatch { expected: fan.ambient_dim, got: q.cols() });
    }
    if q.rank() != q.rows() {
        return Err(ProjectError::RankDeficient);
    }
    let n = q.rows();

    // Image rays, re-primitivized; kernel rays have no image.
    let mut rays: Vec<Vec<i64>> = Vec::new();
    let mut ray_image = Vec::with_capacity(fan.rays.len());
    let mut ray_scale = Vec::with_capacity(fan.rays.len());
    let mut owner: Vec<usize> = Vec::new();
    for i in 0..fan.rays.len() {
        let g = q.mul_vec(&fan.ray_rat(i));
        match primitive_integer(&g) {
            None => {
                ray_image.push(None);
                ray_scale.push(None);
            }
            Some(p) => {
                let p = to_i64(p).ok_or(ProjectError::Overflow)?;
                let nz = p.iter().position(|&x| x != 0).expect("nonzero");
                let scale = &g[nz] / &Rational::from(p[nz]);
                if let Some(j) = rays.iter().position(|r| *r == p) {
                    return Err(ProjectError::NotAFan(FanViolation::RayCollision { first: owner[j], second: i }));
                }
                ray_image.push(Some(rays.len()));
                ray_scale.push(Some(scale));
                rays.push(p);
                owner.push(i);
            }
        }
    }

    let image_of = |c: &Cone| Cone::new(c.ray_ids().iter().filter_map(|&r| ray_image[r]).collect());
    let source_max = fan.maximal_cones();
    let gens = |c: &Cone| -> Vec<RatVector> {
        c.ray_ids().iter().map(|&r| rays[r].iter().map(|&x| Rational::from(x)).collect()).collect()
    };

    for c in &source_max {
        let img = image_of(c);
        if !is_pointed(n, &gens(&img)) {
            return Err(ProjectError::NotAFan(FanViolation::NotStronglyConvex { cone: c.ray_ids().to_vec() }));
        }
        if RatMatrix::from_rows(n, gens(&img)).rank() != img.len() {
            return Err(ProjectError::NotAFan(FanViolation::NotSimplicial { cone: c.ray_ids().to_vec() }));
        }
    }

    // Distinct images, keyed to one source cone for witnesses.
    let mut images: BTreeMap<Cone, Cone> = BTreeMap::new();
    for c in &source_max {
        images.entry(image_of(c)).or_insert_with(|| c.clone());
    }
    let keys: Vec<&Cone> = images.keys().collect();
    for (a_idx, a) in keys.iter().enumerate() {
        for b in &keys[a_idx + 1..] {
            if !meet_in_common_face(n, a, b, &gens) {
                return Err(ProjectError::NotAFan(FanViolation::ImproperIntersection {
                    first: images[*a].ray_ids().to_vec(),
                    second: images[*b].ray_ids().to_vec(),
                }));
            }
        }
    }

    let cones = images.keys().map(|c| c.ray_ids().to_vec()).collect();
    let out = Fan::new(n, rays, cones).map_err(|e| match e {
        FanError::NotSimplicial(c) => ProjectError::NotAFan(FanViolation::NotSimplicial { cone: c }),
        _ => unreachable!("image rays are primitive, distinct and nonzero"),
    })?;
    Ok(Projection { fan: out, ray_image, ray_scale })
}

/// pos(gens) contains no line: no λ ≥ 0 with Σλ = 1 and Σ λ_i g_i = 0.
fn is_pointed(n: usize, gens: &[RatVector]) -> bool {
    if gens.is_empty() {
        return true;
    }
    let k = gens.len();
    let mut p = LpProblem::feasibility(k);
    for d in 0..n {
        p.add_eq(gens.iter().map(|g| g[d].clone()).collect(), Rational::zero());
    }
    p.add_eq(vec![Rational::one(); k], Rational::one());
    for i in 0..k {
        let mut e = vec![Rational::zero(); k];
        e[i] = Rational::one();
        p.add_ge(e, Rational::zero());
    }
    lp::solve(&p).status == LpStatus::Infeasible
}

/// For simplicial cones A, B: A ∩ B = pos(A ∩ B as ray sets). Tested by
/// looking for x = Σ_A λ g = Σ_B μ g with weight on A \ B.
fn meet_in_common_face(n: usize, a: &Cone, b: &Cone, gens: &impl Fn(&Cone) -> Vec<RatVector>) -> bool {
    let ga = gens(a);
    let gb = gens(b);
    let (ka, kb) = (ga.len(), gb.len());
    let only_a: Vec<usize> = (0..ka).filter(|&i| !b.contains_ray(a.ray_ids()[i])).collect();
    if only_a.is_empty() {
        // A is a face of B (as ray sets) and hence a common face.
        return true;
    }
    let mut p = LpProblem::feasibility(ka + kb);
    for d in 0..n {
        let mut row: RatVector = ga.iter().map(|g| g[d].clone()).collect();
        row.extend(gb.iter().map(|g| -&g[d]));
        p.add_eq(row, Rational::zero());
    }
    let mut w = vec![Rational::zero(); ka + kb];
    for &i in &only_a {
        w[i] = Rational::one();
    }
    p.add_eq(w, Rational::one());
    for i in 0..ka + kb {
        let mut e = vec![Rational::zero(); ka + kb];
        e[i] = Rational::one();
        p.add_ge(e, Rational::zero());
    }
    lp::solve(&p).status == LpStatus::Infeasible
}
