use serde::Serialize;

use super::data::{Ambient, LvmbData, QuotientData};
use crate::arith::{GaussianRational, RatMatrix};
use crate::fans::{covers_sampled_points, is_complete, is_nonsingular, project_fan, Fan, FanViolation, Projection};

/// Points drawn for the randomized completeness cross-check.
const COVER_SAMPLES: usize = 256;

/// Condition (1): p restricted to 𝔥 is injective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionOne {
    pub holds: bool,
    /// 2 · |h_basis|.
    pub expected_dim: usize,
    pub ph_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<KernelWitness>,
}

/// A vector h = Σ c_k a_k of 𝔥 with p(h) = 0, given by its coefficients
/// over `h_basis`. When `element` is zero the basis itself is dependent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelWitness {
    pub coefficients: Vec<GaussianRational>,
    pub element: Vec<GaussianRational>,
}

/// Condition (2): q(Δ) is a complete fan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionTwo {
    pub holds: bool,
    pub quotient_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<FanViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    /// Random integer points all landed in some cone (can only refute).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled_cover: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LvmbCheck {
    pub ok: bool,
    pub condition1: ConditionOne,
    pub condition2: ConditionTwo,
    /// Δ nonsingular. Always true for Δ_Σ; reported but not required for
    /// directly supplied fans.
    pub ambient_nonsingular: bool,
}

/// Everything derived from (Δ, 𝔥) before the polytopality question.
#[derive(Debug, Clone)]
pub struct Setup {
    pub data: LvmbData,
    pub ambient: Fan,
    pub quotient: QuotientData,
    pub projection: Option<Projection>,
    pub check: LvmbCheck,
}

impl Setup {
    pub fn new(data: &LvmbData) -> Self {
        let ambient = data.ambient_fan();
        let quotient = QuotientData::of(data);
        let condition1 = condition_one(data, &quotient);
        let n = quotient.n();
        let (projection, condition2) = match project_fan(&ambient, &quotient.q) {
            Ok(p) => {
                let complete = is_complete(&p.fan);
                let cover = covers_sampled_points(&p.fan, COVER_SAMPLES, 0);
                if complete && !cover {
                    log::warn!("wall criterion and point sampling disagree on completeness");
                }
                let c2 = ConditionTwo {
                    holds: complete && cover,
                    quotient_dim: n,
                    violation: None,
                    complete: Some(complete),
                    sampled_cover: Some(cover),
                };
                (Some(p), c2)
            }
            Err(crate::fans::ProjectError::NotAFan(v)) => {
                let c2 = ConditionTwo { holds: false, quotient_dim: n, violation: Some(v), complete: None, sampled_cover: None };
                (None, c2)
            }
            Err(e) => unreachable!("quotient map is well formed: {e}"),
        };
        let ambient_nonsingular = match &data.ambient {
            Ambient::Complex(_) => true,
            Ambient::Fan(f) => is_nonsingular(f),
        };
        let check = LvmbCheck { ok: condition1.holds && condition2.holds, condition1, condition2, ambient_nonsingular };
        Setup { data: data.clone(), ambient, quotient, projection, check }
    }

    /// q(Δ), when condition (2)'s fan part holds.
    pub fn quotient_fan(&self) -> Option<&Fan> {
        self.projection.as_ref().map(|p| &p.fan)
    }
}

fn condition_one(data: &LvmbData, quotient: &QuotientData) -> ConditionOne {
    let m = data.m();
    let expected_dim = 2 * data.h_basis.len();
    let ph_dim = quotient.ph.rows();
    let holds = ph_dim == expected_dim;
    let witness = (!holds).then(|| {
        // Columns: p(a_k), p(i·a_k); a kernel vector gives the coefficients.
        let mut cols = Vec::with_capacity(expected_dim);
        for a in &data.h_basis {
            cols.push(a.iter().map(|z| z.re.clone()).collect::<Vec<_>>());
            cols.push(a.iter().map(|z| -&z.im).collect());
        }
        let k = RatMatrix::from_rows(m, cols).transpose().kernel_basis();
        let c = k.first().expect("rank deficit leaves a kernel");
        let coefficients: Vec<GaussianRational> =
            c.chunks(2).map(|p| GaussianRational::new(p[0].clone(), p[1].clone())).collect();
        let element = (0..m)
            .map(|j| {
                data.h_basis.iter().zip(&coefficients).fold(GaussianRational::zero(), |acc, (a, ck)| &acc + &(ck * &a[j]))
            })
            .collect();
        KernelWitness { coefficients, element }
    });
    ConditionOne { holds, expected_dim, ph_dim, witness }
}

pub fn check_lvmb(data: &LvmbData) -> LvmbCheck {
    Setup::new(data).check
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;
    use crate::fans::SimplicialComplex;

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::new(Rational::from(re), Rational::from(im))
    }

    #[test]
    fn calabi_eckmann_passes() {
        let s = SimplicialComplex::from_maximal(4, &[vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]]).unwrap();
        let d = LvmbData::from_complex(s, vec![vec![g(1, 0), g(1, 0), g(0, 1), g(0, 1)]]).unwrap();
        let c = check_lvmb(&d);
        assert!(c.condition1.holds && c.condition2.holds && c.ok);
        assert_eq!(c.condition2.quotient_dim, 2);
    }

    #[test]
    fn non_injective_projection() {
        let s = SimplicialComplex::from_maximal(2, &[vec![1], vec![2]]).unwrap();
        let d = LvmbData::from_complex(s, vec![vec![g(1, 0), g(0, 0)], vec![g(0, 1), g(0, 0)]]).unwrap();
        let c = check_lvmb(&d);
        assert!(!c.condition1.holds);
        assert_eq!((c.condition1.expected_dim, c.condition1.ph_dim), (4, 1));
        let w = c.condition1.witness.unwrap();
        assert!(w.coefficients.iter().any(|z| !z.is_zero()));
        // p(element) = Re(element) = 0.
        assert!(w.element.iter().all(|z| z.re.is_zero()));
        assert!(!c.ok);
    }

    #[test]
    fn incomplete_quotient() {
        let s = SimplicialComplex::from_maximal(2, &[vec![1], vec![2]]).unwrap();
        let d = LvmbData::from_complex(s, vec![]).unwrap();
        let c = check_lvmb(&d);
        assert!(c.condition1.holds);
        assert!(!c.condition2.holds);
        assert_eq!(c.condition2.complete, Some(false));
    }

    #[test]
    fn collapsing_cone_reports_violation() {
        // p(𝔥) = span{(1,1,0), (0,0,1)} sends e_1 and e_2 to opposite rays.
        let s = SimplicialComplex::from_maximal(3, &[vec![1, 2]]).unwrap();
        let d = LvmbData::from_complex(s, vec![vec![g(1, 0), g(1, 0), g(0, 1)]]).unwrap();
        let c = check_lvmb(&d);
        assert!(c.condition1.holds);
        assert!(matches!(c.condition2.violation, Some(FanViolation::NotStronglyConvex { .. })));
    }
}
