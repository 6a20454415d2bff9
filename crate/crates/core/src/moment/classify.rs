use serde::Serialize;

use super::check::{LvmbCheck, Setup};
use super::data::{LvmbData, QuotientData};
use crate::arith::{RatVector, Rational};
use crate::fans::Fan;
use crate::lp::{solve, support_function_lp, verify_certificate, LpCertificate, LpStatus, SupportSolution};
use crate::polytope::{normality_report, polytope_from_support, vertices, HPolytope, NormalityReport, PolytopeDoc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "LVM")]
    Lvm,
    #[serde(rename = "LVMB-not-LVM")]
    LvmbNotLvm,
    #[serde(rename = "not-LVMB")]
    NotLvmb,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Lvm => "LVM",
            Verdict::LvmbNotLvm => "LVMB-not-LVM",
            Verdict::NotLvmb => "not-LVMB",
        })
    }
}

/// The polytopality LP on q(Δ) and what it proves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportEvidence {
    /// Optimum of t, capped at 1.
    pub t_star: Rational,
    pub certificate: LpCertificate,
    pub certificate_verified: bool,
    pub solution: SupportSolution,
    /// When t* = 0: the system with t ≥ 1 added is infeasible, witnessed by
    /// this Farkas vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<LpCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction_verified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub lvmb: LvmbCheck,
    /// Basis of 𝔤_J and the quotient map; polytope coordinates refer to q.
    pub quotient: QuotientData,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_fan: Option<Fan>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<SupportEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polytope: Option<PolytopeDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normality: Option<NormalityReport>,
}

impl ClassificationReport {
    /// Offsets a, one per ray of q(Δ), when the verdict is LVM.
    pub fn offsets(&self) -> Option<&RatVector> {
        (self.verdict == Verdict::Lvm).then(|| &self.support.as_ref().expect("LVM has support evidence").solution.offsets)
    }

    pub fn polytope(&self) -> Option<HPolytope> {
        self.polytope.as_ref().map(|d| d.polytope().expect("stored polytope is well formed"))
    }
}

pub fn classify(data: &LvmbData) -> ClassificationReport {
    classify_setup(&Setup::new(data))
}

pub fn classify_setup(setup: &Setup) -> ClassificationReport {
    let mut report = ClassificationReport {
        verdict: Verdict::NotLvmb,
        lvmb: setup.check.clone(),
        quotient: setup.quotient.clone(),
        quotient_fan: setup.quotient_fan().cloned(),
        support: None,
        polytope: None,
        normality: None,
    };
    if !setup.check.ok {
        return report;
    }
    let qfan = setup.quotient_fan().expect("condition (2) holds");
    let lp = support_function_lp(qfan).expect("condition (2) includes completeness");
    let certificate = lp.solve();
    assert_eq!(certificate.status, LpStatus::Optimal, "support LP is feasible (a = 0, t = 0) and capped");
    let certificate_verified = verify_certificate(&lp.problem, &certificate).is_ok();
    let t_star = certificate.value.clone().expect("optimal");
    let solution = lp.decode(certificate.primal.as_ref().expect("optimal"));
    log::debug!("support LP optimum t* = {t_star} after {} pivots", certificate.pivots);

    if t_star.is_positive() {
        let poly = polytope_from_support(qfan, &solution.offsets).expect("one offset per ray");
        let verts = vertices(&poly, qfan).expect("simplicial complete fan gives square vertex systems");
        report.normality = Some(normality_report(&poly, qfan));
        report.polytope = Some(PolytopeDoc::from_polytope(&poly, Some(verts.into_iter().map(|(_, v)| v).collect())));
        report.verdict = Verdict::Lvm;
        report.support =
            Some(SupportEvidence { t_star, certificate, certificate_verified, solution, obstruction: None, obstruction_verified: None });
    } else {
        let blocked = lp.with_min_slack(Rational::one());
        let obstruction = solve(&blocked);
        let obstruction_verified =
            obstruction.status == LpStatus::Infeasible && verify_certificate(&blocked, &obstruction).is_ok();
        report.verdict = Verdict::LvmbNotLvm;
        report.support = Some(SupportEvidence {
            t_star,
            certificate,
            certificate_verified,
            solution,
            obstruction: Some(obstruction),
            obstruction_verified: Some(obstruction_verified),
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::GaussianRational;
    use crate::fans::SimplicialComplex;
    use crate::polytope::{is_normal_to, normal_fan};

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::new(Rational::from(re), Rational::from(im))
    }

    #[test]
    fn projective_space_is_lvm_simplex() {
        for m in 1..=3 {
            let d = LvmbData::from_complex(SimplicialComplex::simplex_boundary(m), vec![]).unwrap();
            let r = classify(&d);
            assert_eq!(r.verdict, Verdict::Lvm);
            let p = r.polytope().unwrap();
            assert!(is_normal_to(&p, r.quotient_fan.as_ref().unwrap()));
            assert_eq!(r.polytope.unwrap().vertices.unwrap().len(), m + 1);
        }
    }

    #[test]
    fn calabi_eckmann_is_square() {
        let s = SimplicialComplex::from_maximal(4, &[vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]]).unwrap();
        let d = LvmbData::from_complex(s, vec![vec![g(1, 0), g(1, 0), g(0, 1), g(0, 1)]]).unwrap();
        let r = classify(&d);
        assert_eq!(r.verdict, Verdict::Lvm);
        let p = r.polytope().unwrap();
        assert_eq!(normal_fan(&p).unwrap().maximal_cones().len(), 4);
        assert!(r.normality.unwrap().normal);
        assert!(r.support.unwrap().certificate_verified);
    }

    #[test]
    fn hopf_is_point() {
        let s = SimplicialComplex::from_maximal(2, &[vec![1], vec![2]]).unwrap();
        let d = LvmbData::from_complex(s, vec![vec![g(1, 0), g(1, 1)]]).unwrap();
        let r = classify(&d);
        assert_eq!(r.verdict, Verdict::Lvm);
        assert_eq!(r.quotient.ph.row_vecs(), crate::arith::RatMatrix::identity(2).row_vecs());
        let p = r.polytope().unwrap();
        assert_eq!(p.dim, 0);
        assert_eq!(r.polytope.unwrap().vertices, Some(vec![vec![]]));
    }

    #[test]
    fn failing_conditions_give_not_lvmb() {
        let s = SimplicialComplex::from_maximal(2, &[vec![1], vec![2]]).unwrap();
        let r = classify(&LvmbData::from_complex(s, vec![]).unwrap());
        assert_eq!(r.verdict, Verdict::NotLvmb);
        assert!(r.support.is_none());
        let empty = SimplicialComplex::from_maximal(2, &[]).unwrap();
        assert_eq!(classify(&LvmbData::from_complex(empty, vec![]).unwrap()).verdict, Verdict::NotLvmb);
    }

    #[test]
    fn verdict_json_names() {
        assert_eq!(serde_json::to_string(&Verdict::LvmbNotLvm).unwrap(), "\"LVMB-not-LVM\"");
        assert_eq!(Verdict::NotLvmb.to_string(), "not-LVMB");
    }
}
