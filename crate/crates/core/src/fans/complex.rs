use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Abstract simplicial complex on the vertex set {0, …, m}, stored as the
/// full (downward closed) set of faces. Faces are sorted vertex lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ComplexSpec", into = "ComplexSpec")]
pub struct SimplicialComplex {
    m: usize,
    faces: BTreeSet<Vec<usize>>,
}

/// On-disk form: `{"m": m, "maximal_faces": [[…]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub m: usize,
    pub maximal_faces: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("face {face:?} has vertex outside {{0, …, {m}}}")]
    VertexOutOfRange { face: Vec<usize>, m: usize },
    #[error("face {0:?} is the whole ground set; cones of the fan would not be proper")]
    FullGroundSet(Vec<usize>),
}

impl SimplicialComplex {
    /// Downward closure of the given faces (∅ always included).
    pub fn from_maximal(m: usize, maximal_faces: &[Vec<usize>]) -> Result<Self, ComplexError> {
        let mut faces = BTreeSet::new();
        faces.insert(Vec::new());
        for face in maximal_faces {
            let set: BTreeSet<usize> = face.iter().copied().collect();
            if set.iter().any(|&v| v > m) {
                return Err(ComplexError::VertexOutOfRange { face: face.clone(), m });
            }
            if set.len() == m + 1 {
                return Err(ComplexError::FullGroundSet(face.clone()));
            }
            let verts: Vec<usize> = set.into_iter().collect();
            for mask in 0u64..(1u64 << verts.len()) {
                let sub: Vec<usize> = verts
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                faces.insert(sub);
            }
        }
        Ok(SimplicialComplex { m, faces })
    }

    /// Boundary of the m-simplex: every proper subset of {0, …, m}.
    pub fn simplex_boundary(m: usize) -> Self {
        let maximal: Vec<Vec<usize>> = (0..=m).map(|skip| (0..=m).filter(|&v| v != skip).collect()).collect();
        Self::from_maximal(m, &maximal).expect("proper subsets are valid faces")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn faces(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.faces.iter()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn contains(&self, face: &[usize]) -> bool {
        let mut f = face.to_vec();
        f.sort_unstable();
        f.dedup();
        self.faces.contains(&f)
    }

    pub fn maximal_faces(&self) -> Vec<Vec<usize>> {
        self.faces
            .iter()
            .filter(|f| {
                !self.faces.iter().any(|g| g.len() > f.len() && f.iter().all(|v| g.contains(v)))
            })
            .cloned()
            .collect()
    }

    /// `{i}` is not a face.
    pub fn is_indispensable(&self, i: usize) -> bool {
        !self.faces.contains(&vec![i])
    }

    /// Vertices i with `{i}` a face, in increasing order.
    pub fn vertices(&self) -> Vec<usize> {
        (0..=self.m).filter(|&i| !self.is_indispensable(i)).collect()
    }

    /// Relabel vertices by `perm` (a permutation of {0, …, m}).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.m + 1);
        let faces = self
            .faces
            .iter()
            .map(|f| {
                let mut g: Vec<usize> = f.iter().map(|&v| perm[v]).collect();
                g.sort_unstable();
                g
            })
            .collect();
        SimplicialComplex { m: self.m, faces }
    }
}

impl TryFrom<ComplexSpec> for SimplicialComplex {
    type Error = ComplexError;
    fn try_from(spec: ComplexSpec) -> Result<Self, Self::Error> {
        SimplicialComplex::from_maximal(spec.m, &spec.maximal_faces)
    }
}

impl From<SimplicialComplex> for ComplexSpec {
    fn from(c: SimplicialComplex) -> Self {
        let maximal_faces = c.maximal_faces().into_iter().filter(|f| !f.is_empty()).collect();
        ComplexSpec { m: c.m, maximal_faces }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_examples() {
        let s = SimplicialComplex::from_maximal(2, &[vec![1], vec![2]]).unwrap();
        let faces: Vec<_> = s.faces().cloned().collect();
        assert_eq!(faces, vec![vec![], vec![1], vec![2]]);

        let ce = SimplicialComplex::from_maximal(4, &[vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]]).unwrap();
        assert_eq!(ce.face_count(), 9);

        let empty = SimplicialComplex::from_maximal(1, &[]).unwrap();
        assert_eq!(empty.faces().collect::<Vec<_>>(), vec![&Vec::<usize>::new()]);
    }

    #[test]
    fn closure_errors() {
        assert!(matches!(
            SimplicialComplex::from_maximal(2, &[vec![0, 3]]),
            Err(ComplexError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            SimplicialComplex::from_maximal(2, &[vec![0, 1, 2]]),
            Err(ComplexError::FullGroundSet(_))
        ));
    }

    #[test]
    fn indispensable() {
        let s = SimplicialComplex::from_maximal(2, &[vec![1], vec![2]]).unwrap();
        assert!(s.is_indispensable(0));
        assert!(!s.is_indispensable(1));
        let e = SimplicialComplex::from_maximal(3, &[]).unwrap();
        assert!((0..=3).all(|i| e.is_indispensable(i)));
    }

    #[test]
    fn simplex_boundary_counts() {
        let s = SimplicialComplex::simplex_boundary(2);
        assert_eq!(s.face_count(), 7);
        assert_eq!(s.maximal_faces().len(), 3);
        assert_eq!(s.vertices(), vec![0, 1, 2]);
    }

    #[test]
    fn json_roundtrip() {
        let s = SimplicialComplex::from_maximal(4, &[vec![1, 3], vec![2, 4]]).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"m":4,"maximal_faces":[[1,3],[2,4]]}"#);
        let back: SimplicialComplex = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SimplicialComplex>(r#"{"m":1,"maximal_faces":[[0,1]]}"#).is_err());
    }
}
