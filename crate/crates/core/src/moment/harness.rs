use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::check::Setup;
use super::classify::{classify_setup, Verdict};
use super::data::LvmbData;
use super::model::{MomentModel, SamplePoint};
use crate::arith::{dot, RatMatrix, RatVector, Rational};
use crate::fans::Cone;
use crate::lp::minimize_over_polytope;
use crate::polytope::{contains, enumerate_vertices, normality_report, NormalityReport};

/// Seeded integer directions checked against the LP.
pub const DIRECTIONS: usize = 20;
/// Random kernel combinations checked on top of the basis rows.
pub const KERNEL_COMBINATIONS: usize = 5;
const DIRECTION_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub max: f64,
    pub pass: bool,
}

impl Bound {
    fn new(values: impl Iterator<Item = f64>, tol: f64) -> Self {
        let max = values.fold(0.0, f64::max);
        Bound { max, pass: max <= tol }
    }
}

/// Φ̃ of the point Y_σ over the vertex of cone σ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexImage {
    pub cone: Cone,
    /// Chart labels of the coordinates vanishing at Y_σ.
    pub zero_labels: Vec<usize>,
    pub image: RatVector,
    /// Y_σ lies in the domain, its zeros map onto σ and Φ̃(Y_σ) is the vertex.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexCheck {
    pub images: Vec<VertexImage>,
    /// Images coincide with the vertices found by exhaustive enumeration.
    pub match_vertices: bool,
    /// Every inequality is tight on a facet spanned by images.
    pub facets_tight: bool,
    pub normality: NormalityReport,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionCheck {
    pub v: Vec<i64>,
    pub qv: RatVector,
    pub lp_min: Rational,
    pub vertex_min: Rational,
    pub sampled_min: Option<f64>,
    pub tight_set: Vec<usize>,
    pub face_dim: usize,
    /// The cone of q(Δ) with q(v) in its relative interior.
    pub carrier: Option<Cone>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelCheck {
    pub w: RatVector,
    /// ⟨Φ(z), w⟩ should equal −⟨a, w⟩ on every sample.
    pub expected: Rational,
    pub spread: f64,
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub pass: bool,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling_error: Option<String>,
    /// P-membership violation of Φ̃(z).
    pub membership: Bound,
    /// |Φ(z) + c − q*(Φ̃(z))|.
    pub lift_residual: Bound,
    /// |i*Φ(z) − β|.
    pub level_residual: Bound,
    pub vertices: VertexCheck,
    pub directions: Vec<DirectionCheck>,
    pub kernel_directions: Vec<KernelCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HarnessError {
    #[error("verdict is {0}, the harness needs LVM")]
    NotLvm(Verdict),
    #[error("{0}")]
    Model(String),
}

/// Classify, then run [`verify_model`] on the resulting polytope.
pub fn verify_convexity(data: &LvmbData, samples: usize, seed: u64, tol: f64) -> Result<ConvexityReport, HarnessError> {
    let setup = Setup::new(data);
    let report = classify_setup(&setup);
    let offsets = report.offsets().ok_or(HarnessError::NotLvm(report.verdict))?;
    let model = MomentModel::new(&setup, offsets).map_err(|e| HarnessError::Model(e.to_string()))?;
    Ok(verify_model(&model, samples, seed, tol))
}

pub fn verify_model(model: &MomentModel, samples: usize, seed: u64, tol: f64) -> ConvexityReport {
    let (points, sampling_error) = match model.sample(samples, seed) {
        Ok(p) => (p, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let lifts: Vec<(Vec<f64>, f64)> = points.iter().map(|p| model.lift(&p.r)).collect();

    let membership = Bound::new(lifts.iter().map(|(a, _)| crate::polytope::membership_violation(&model.polytope, a)), tol);
    let lift_residual = Bound::new(lifts.iter().map(|(_, r)| *r), tol);
    let level_residual = Bound::new(points.iter().map(|p| model.level_residual(&p.r)), tol);
    let vertices = vertex_check(model);
    let directions = direction_checks(model, &lifts, seed, tol);
    let kernel_directions = kernel_checks(model, &points, seed, tol);

    let pass = sampling_error.is_none()
        && membership.pass
        && lift_residual.pass
        && level_residual.pass
        && vertices.pass
        && directions.iter().all(|d| d.pass)
        && kernel_directions.iter().all(|k| k.pass);
    ConvexityReport {
        pass,
        seed,
        samples,
        tol,
        sampling_error,
        membership,
        lift_residual,
        level_residual,
        vertices,
        directions,
        kernel_directions,
        runtime_ms: None,
    }
}

fn vertex_check(model: &MomentModel) -> VertexCheck {
    let n = model.n();
    let mut images = Vec::with_capacity(model.vertices.len());
    for (cone, v) in &model.vertices {
        let radii = model.radii_exact(v);
        let zeros: Vec<usize> = (0..radii.len()).filter(|&c| radii[c].is_zero()).collect();
        let nonneg = radii.iter().all(|r| !r.is_negative());
        let in_domain = model.chart.admits_zeros(&model.ambient, &zeros);
        // Zeros must be exactly the coordinates over the rays of σ.
        let mut hit: Vec<usize> = zeros.iter().filter_map(|&c| model.qray[c]).collect();
        hit.sort_unstable();
        hit.dedup();
        let image = model.lift_exact(&radii);
        let pass = nonneg && in_domain && hit == cone.ray_ids() && image.as_ref() == Some(v);
        images.push(VertexImage {
            cone: cone.clone(),
            zero_labels: zeros.iter().map(|&c| model.chart.labels[c]).collect(),
            image: image.unwrap_or_default(),
            pass,
        });
    }

    let mut found: Vec<RatVector> = images.iter().map(|i| i.image.clone()).collect();
    found.sort();
    found.dedup();
    let mut enumerated: Vec<RatVector> = enumerate_vertices(&model.polytope).into_iter().map(|(v, _)| v).collect();
    enumerated.sort();
    let match_vertices = found.len() == images.len() && found == enumerated && found.iter().all(|v| contains(&model.polytope, v));

    let facets_tight = (0..model.polytope.len()).all(|i| {
        let on: Vec<&RatVector> = found.iter().filter(|v| model.polytope.slacks(v)[i].is_zero()).collect();
        let Some(base) = on.first() else { return false };
        let diffs = on[1..].iter().map(|v| v.iter().zip(base.iter()).map(|(x, y)| x - y).collect()).collect();
        RatMatrix::from_rows(n, diffs).rank() + 1 == n
    });
    let normality = normality_report(&model.polytope, &model.qfan);
    let pass = images.iter().all(|i| i.pass) && match_vertices && facets_tight && normality.normal;
    VertexCheck { images, match_vertices, facets_tight, normality, pass }
}

fn direction_checks(model: &MomentModel, lifts: &[(Vec<f64>, f64)], seed: u64, tol: f64) -> Vec<DirectionCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(DIRECTION_STREAM);
    let k = model.chart.len();
    (0..DIRECTIONS)
        .map(|_| {
            let v: Vec<i64> = (0..k).map(|_| rng.random_range(-3..=3)).collect();
            let vr: RatVector = v.iter().map(|&x| Rational::from(x)).collect();
            let qv = model.q_total.mul_vec(&vr);
            let (lp_min, face) = minimize_over_polytope(&model.polytope, &qv).expect("P is a nonempty polytope");
            let vertex_min = model.vertices.iter().map(|(_, p)| dot(p, &qv)).min().expect("P has a vertex");
            let qf: Vec<f64> = qv.iter().map(Rational::to_f64).collect();
            let sampled_min = lifts
                .iter()
                .map(|(a, _)| a.iter().zip(&qf).map(|(x, y)| x * y).sum::<f64>())
                .reduce(f64::min);
            let carrier = model.qfan.carrier(&qv);
            let face_matches = carrier.as_ref().is_some_and(|c| c.ray_ids() == face.tight_set.as_slice());
            let pass = face_matches
                && vertex_min == lp_min
                && face.dim + face.tight_set.len() == model.n()
                && sampled_min.is_none_or(|s| s >= lp_min.to_f64() - tol);
            DirectionCheck { v, qv, lp_min, vertex_min, sampled_min, tight_set: face.tight_set, face_dim: face.dim, carrier, pass }
        })
        .collect()
}

fn kernel_checks(model: &MomentModel, points: &[SamplePoint], seed: u64, tol: f64) -> Vec<KernelCheck> {
    let basis = model.level.row_vecs();
    if basis.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(DIRECTION_STREAM - 1);
    let k = model.chart.len();
    let mut ws = basis.clone();
    for _ in 0..KERNEL_COMBINATIONS {
        let mut w = vec![Rational::zero(); k];
        for b in &basis {
            let c = Rational::from(rng.random_range(-3i64..=3));
            for (x, y) in w.iter_mut().zip(b) {
                *x += &(&c * y);
            }
        }
        ws.push(w);
    }
    ws.into_iter()
        .map(|w| {
            let expected = -dot(&model.offsets, &w);
            let e = expected.to_f64();
            let wf: Vec<f64> = w.iter().map(Rational::to_f64).collect();
            let h: Vec<f64> = points.iter().map(|p| p.r.iter().zip(&wf).map(|(x, y)| x * y).sum()).collect();
            let lo = h.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let spread = if h.is_empty() { 0.0 } else { hi - lo };
            let max_deviation = h.iter().map(|x| (x - e).abs()).fold(0.0, f64::max);
            KernelCheck { w, expected, spread, max_deviation, pass: spread <= tol && max_deviation <= tol }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_vec, GaussianRational};
    use crate::fans::SimplicialComplex;

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::new(Rational::from(re), Rational::from(im))
    }

    fn ce() -> LvmbData {
        let s = SimplicialComplex::from_maximal(4, &[vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]]).unwrap();
        LvmbData::from_complex(s, vec![vec![g(1, 0), g(1, 0), g(0, 1), g(0, 1)]]).unwrap()
    }

    #[test]
    fn cp2_passes() {
        let d = LvmbData::from_complex(SimplicialComplex::simplex_boundary(2), vec![]).unwrap();
        let r = verify_convexity(&d, 200, 0, 1e-9).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.vertices.images.len(), 3);
    }

    #[test]
    fn calabi_eckmann_passes() {
        let r = verify_convexity(&ce(), 200, 5, 1e-9).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.kernel_directions.len(), 2 + KERNEL_COMBINATIONS);
    }

    #[test]
    fn calabi_eckmann_first_coordinate_direction() {
        let setup = Setup::new(&ce());
        let rep = classify_setup(&setup);
        let model = MomentModel::new(&setup, rep.offsets().unwrap()).unwrap();
        // q(e_1) = (−1, 0): the minimizing face is the edge with inner normal (−1, 0).
        let qv = model.q_total.mul_vec(&rat_vec(&[1, 0, 0, 0]));
        assert_eq!(qv, rat_vec(&[-1, 0]));
        let (_, face) = minimize_over_polytope(&model.polytope, &qv).unwrap();
        assert_eq!(face.dim, 1);
        assert_eq!(face.tight_set.len(), 1);
        assert_eq!(model.polytope.normals[face.tight_set[0]], rat_vec(&[-1, 0]));
    }

    #[test]
    fn hopf_passes() {
        let s = SimplicialComplex::from_maximal(2, &[vec![1], vec![2]]).unwrap();
        let d = LvmbData::from_complex(s, vec![vec![g(1, 0), g(1, 1)]]).unwrap();
        let r = verify_convexity(&d, 100, 2, 1e-9).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.vertices.images[0].image, Vec::<Rational>::new());
    }

    #[test]
    fn not_lvm_is_refused() {
        let s = SimplicialComplex::from_maximal(2, &[vec![1], vec![2]]).unwrap();
        let d = LvmbData::from_complex(s, vec![]).unwrap();
        assert_eq!(verify_convexity(&d, 10, 0, 1e-9).unwrap_err(), HarnessError::NotLvm(Verdict::NotLvmb));
    }

    #[test]
    fn report_is_deterministic() {
        let a = serde_json::to_string(&verify_convexity(&ce(), 50, 9, 1e-9).unwrap()).unwrap();
        let b = serde_json::to_string(&verify_convexity(&ce(), 50, 9, 1e-9).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
