use serde::{Deserialize, Serialize};

use crate::arith::{real_projection_span, GaussianRational, RatMatrix};
use crate::fans::{fan_from_complex, ComplexError, Fan, FanSpec, SimplicialComplex};

/// Where the ambient fan Δ comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ambient {
    /// Δ = Δ_Σ in ℝ^m for a simplicial complex Σ on {0, …, m}.
    Complex(SimplicialComplex),
    /// Δ given directly as a fan in ℝ^m.
    Fan(Fan),
}

/// Input data (Δ, 𝔥) with 𝔥 ⊆ ℂ^m spanned by `h_basis`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InputSpec", into = "InputSpec")]
pub struct LvmbData {
    pub ambient: Ambient,
    pub h_basis: Vec<Vec<GaussianRational>>,
}

/// File form. Exactly one of `m`/`maximal_faces` or `fan` is given:
/// `{"m": 4, "maximal_faces": [[1,3]], "h_basis": [[{"re": 1, "im": 0}, …]]}`
/// or `{"fan": {"ambient_dim": …, "rays": …, "cones": …}, "h_basis": []}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximal_faces: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<FanSpec>,
    #[serde(default)]
    pub h_basis: Vec<Vec<GaussianRational>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DataError {
    #[error("give either \"m\" with \"maximal_faces\" or \"fan\", not both")]
    AmbiguousAmbient,
    #[error("missing field \"{0}\"")]
    Missing(&'static str),
    #[error("maximal_faces: {0}")]
    Complex(#[from] ComplexError),
    #[error("fan: {0}")]
    Fan(String),
    #[error("h_basis[{index}] has length {got}, expected {expected}")]
    HLength { index: usize, got: usize, expected: usize },
}

impl LvmbData {
    pub fn new(ambient: Ambient, h_basis: Vec<Vec<GaussianRational>>) -> Result<Self, DataError> {
        let d = LvmbData { ambient, h_basis };
        let m = d.m();
        for (index, v) in d.h_basis.iter().enumerate() {
            if v.len() != m {
                return Err(DataError::HLength { index, got: v.len(), expected: m });
            }
        }
        Ok(d)
    }

    pub fn from_complex(sigma: SimplicialComplex, h_basis: Vec<Vec<GaussianRational>>) -> Result<Self, DataError> {
        Self::new(Ambient::Complex(sigma), h_basis)
    }

    pub fn from_fan(fan: Fan, h_basis: Vec<Vec<GaussianRational>>) -> Result<Self, DataError> {
        Self::new(Ambient::Fan(fan), h_basis)
    }

    /// Dimension of the ambient space ℝ^m of Δ.
    pub fn m(&self) -> usize {
        match &self.ambient {
            Ambient::Complex(s) => s.m(),
            Ambient::Fan(f) => f.ambient_dim(),
        }
    }

    pub fn ambient_fan(&self) -> Fan {
        match &self.ambient {
            Ambient::Complex(s) => fan_from_complex(s),
            Ambient::Fan(f) => f.clone(),
        }
    }

    /// Apply a permutation of {1, …, m} to Σ and to the coordinates of 𝔥;
    /// `perm[i - 1]` is the new label of `i`. Vertex 0 stays fixed. In
    /// direct-fan mode the coordinates of ℝ^m are permuted instead.
    pub fn relabel(&self, perm: &[usize]) -> LvmbData {
        let m = self.m();
        assert_eq!(perm.len(), m);
        let permute = |v: &Vec<GaussianRational>| {
            let mut out = vec![GaussianRational::zero(); m];
            for (i, z) in v.iter().enumerate() {
                out[perm[i] - 1] = z.clone();
            }
            out
        };
        let h_basis = self.h_basis.iter().map(permute).collect();
        let ambient = match &self.ambient {
            Ambient::Complex(s) => {
                let full: Vec<usize> = std::iter::once(0).chain(perm.iter().copied()).collect();
                Ambient::Complex(s.relabel(&full))
            }
            Ambient::Fan(f) => {
                let rays = f
                    .rays()
                    .iter()
                    .map(|r| {
                        let mut out = vec![0; m];
                        for (i, x) in r.iter().enumerate() {
                            out[perm[i] - 1] = *x;
                        }
                        out
                    })
                    .collect();
                let cones = f.maximal_cones().iter().map(|c| c.ray_ids().to_vec()).collect();
                Ambient::Fan(Fan::new(m, rays, cones).expect("coordinate permutation preserves fans"))
            }
        };
        LvmbData { ambient, h_basis }
    }
}

impl TryFrom<InputSpec> for LvmbData {
    type Error = DataError;
    fn try_from(s: InputSpec) -> Result<Self, DataError> {
        let ambient = match (s.m, s.maximal_faces, s.fan) {
            (Some(m), Some(faces), None) => Ambient::Complex(SimplicialComplex::from_maximal(m, &faces)?),
            (None, None, Some(f)) => Ambient::Fan(Fan::try_from(f).map_err(|e| DataError::Fan(e.to_string()))?),
            (None, None, None) => return Err(DataError::Missing("m")),
            (Some(_), None, None) => return Err(DataError::Missing("maximal_faces")),
            (None, Some(_), None) => return Err(DataError::Missing("m")),
            _ => return Err(DataError::AmbiguousAmbient),
        };
        LvmbData::new(ambient, s.h_basis)
    }
}

impl From<LvmbData> for InputSpec {
    fn from(d: LvmbData) -> Self {
        match d.ambient {
            Ambient::Complex(s) => {
                let spec: crate::fans::ComplexSpec = s.into();
                InputSpec { m: Some(spec.m), maximal_faces: Some(spec.maximal_faces), fan: None, h_basis: d.h_basis }
            }
            Ambient::Fan(f) => InputSpec { m: None, maximal_faces: None, fan: Some(f.into()), h_basis: d.h_basis },
        }
    }
}

/// Echelon basis of 𝔤_J = p(𝔥).
pub fn g_j(data: &LvmbData) -> RatMatrix {
    real_projection_span(data.m(), &data.h_basis)
}

/// The quotient 𝔤 → 𝔤/𝔤_J in coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientData {
    /// Echelon basis of p(𝔥).
    pub ph: RatMatrix,
    pub pivots: Vec<usize>,
    /// `n × m` with kernel p(𝔥); row k reads off the k-th non-pivot column.
    pub q: RatMatrix,
}

impl QuotientData {
    /// With R = rref(pH) and free columns f, q(x)_f = x_f − Σ_p x_{pivot(p)} R[p][f].
    pub fn new(ph: &RatMatrix) -> Self {
        let e = ph.rref();
        let m = ph.cols();
        let free: Vec<usize> = (0..m).filter(|c| !e.pivots.contains(c)).collect();
        let mut q = RatMatrix::zeros(free.len(), m);
        for (k, &f) in free.iter().enumerate() {
            q.set(k, f, crate::arith::Rational::one());
            for (p, &pc) in e.pivots.iter().enumerate() {
                q.set(k, pc, -e.matrix.get(p, f));
            }
        }
        let ph = RatMatrix::from_rows(m, e.matrix.row_vecs().into_iter().take(e.pivots.len()).collect());
        QuotientData { ph, pivots: e.pivots, q }
    }

    pub fn of(data: &LvmbData) -> Self {
        Self::new(&g_j(data))
    }

    /// n = m − dim p(𝔥).
    pub fn n(&self) -> usize {
        self.q.rows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat_vec, Rational};

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::new(Rational::from(re), Rational::from(im))
    }

    fn ce() -> LvmbData {
        let s = SimplicialComplex::from_maximal(4, &[vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]]).unwrap();
        LvmbData::from_complex(s, vec![vec![g(1, 0), g(1, 0), g(0, 1), g(0, 1)]]).unwrap()
    }

    #[test]
    fn g_j_examples() {
        assert_eq!(g_j(&ce()).row_vecs(), vec![rat_vec(&[1, 1, 0, 0]), rat_vec(&[0, 0, 1, 1])]);
        let s = SimplicialComplex::simplex_boundary(2);
        assert_eq!(g_j(&LvmbData::from_complex(s, vec![]).unwrap()).rows(), 0);
        let full = LvmbData::from_complex(
            SimplicialComplex::from_maximal(2, &[vec![1], vec![2]]).unwrap(),
            vec![vec![g(1, 0), g(0, 0)], vec![g(0, 0), g(1, 0)]],
        )
        .unwrap();
        assert_eq!(g_j(&full).row_vecs(), vec![rat_vec(&[1, 0]), rat_vec(&[0, 1])]);
    }

    #[test]
    fn quotient_kills_ph() {
        let qd = QuotientData::of(&ce());
        assert_eq!(qd.q.row_vecs(), vec![rat_vec(&[-1, 1, 0, 0]), rat_vec(&[0, 0, -1, 1])]);
        assert!(qd.q.mul(&qd.ph.transpose()).is_zero());
        let hopf = QuotientData::new(&RatMatrix::from_i64_rows(2, &[vec![1, 1], vec![0, 1]]));
        assert_eq!(hopf.n(), 0);
        let zero = QuotientData::new(&RatMatrix::zeros(0, 3));
        assert_eq!(zero.q, RatMatrix::identity(3));
    }

    #[test]
    fn json_forms() {
        let j = r#"{"m":4,"maximal_faces":[[1,3],[1,4],[2,3],[2,4]],"h_basis":[[{"re":1,"im":0},{"re":"1","im":"0"},{"re":0,"im":1},{"re":0,"im":1}]]}"#;
        let d: LvmbData = serde_json::from_str(j).unwrap();
        assert_eq!(d, ce());
        let back: LvmbData = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);

        let f = r#"{"fan":{"ambient_dim":1,"rays":[[1],[-1]],"cones":[[0],[1]]},"h_basis":[]}"#;
        let d: LvmbData = serde_json::from_str(f).unwrap();
        assert!(matches!(d.ambient, Ambient::Fan(_)));

        let bad_len = r#"{"m":2,"maximal_faces":[[1]],"h_basis":[[{"re":1,"im":0}]]}"#;
        let e = serde_json::from_str::<LvmbData>(bad_len).unwrap_err().to_string();
        assert!(e.contains("h_basis[0]"), "{e}");
        let both = r#"{"m":1,"maximal_faces":[],"fan":{"ambient_dim":1,"rays":[],"cones":[]}}"#;
        assert!(serde_json::from_str::<LvmbData>(both).is_err());
        let unknown = r#"{"m":1,"maximal_faces":[],"extra":1}"#;
        assert!(serde_json::from_str::<LvmbData>(unknown).is_err());
    }

    #[test]
    fn relabel_swaps_coordinates() {
        let r = ce().relabel(&[3, 4, 1, 2]);
        assert_eq!(r.h_basis[0], vec![g(0, 1), g(0, 1), g(1, 0), g(1, 0)]);
        match r.ambient {
            Ambient::Complex(s) => assert!(s.contains(&[1, 3]) && s.contains(&[3, 2])),
            Ambient::Fan(_) => unreachable!(),
        }
    }
}
