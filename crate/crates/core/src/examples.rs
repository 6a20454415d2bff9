//! Built-in data sets.

use crate::arith::{GaussianRational, Rational};
use crate::fans::{Fan, SimplicialComplex};
use crate::moment::LvmbData;

pub const EXAMPLE_NAMES: [&str; 4] = ["projective-space-<m>", "hopf", "calabi-eckmann", "nonpolytopal-fan"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown example {0:?}; available: {names}", names = EXAMPLE_NAMES.join(", "))]
pub struct UnknownExample(pub String);

fn gauss(re: i64, im: i64) -> GaussianRational {
    GaussianRational::new(Rational::from(re), Rational::from(im))
}

/// Σ = all proper subsets of {0, …, m}, 𝔥 = 0.
pub fn projective_space(m: usize) -> LvmbData {
    LvmbData::from_complex(SimplicialComplex::simplex_boundary(m), vec![]).expect("no h vectors")
}

/// m = 2, Σ = {∅, {1}, {2}}, 𝔥 = ℂ·(1, 1 + i).
pub fn hopf() -> LvmbData {
    let sigma = SimplicialComplex::from_maximal(2, &[vec![1], vec![2]]).expect("valid faces");
    LvmbData::from_complex(sigma, vec![vec![gauss(1, 0), gauss(1, 1)]]).expect("length 2")
}

/// m = 4, Σ maximal {1,3}, {1,4}, {2,3}, {2,4}; 𝔥 = ℂ·(1, 1, i, i).
pub fn calabi_eckmann() -> LvmbData {
    let sigma = SimplicialComplex::from_maximal(4, &[vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4]]).expect("valid faces");
    LvmbData::from_complex(sigma, vec![vec![gauss(1, 0), gauss(1, 0), gauss(0, 1), gauss(0, 1)]]).expect("length 4")
}

/// A complete simplicial fan in ℝ³ that is not the normal fan of any
/// polytope: a triangular prism whose side squares are split by diagonals
/// that all turn the same way. Rays 0–2 sit below the plane z = 0, rays 3–5
/// above it.
pub fn nonpolytopal_fan() -> Fan {
    let rays = vec![vec![1, 0, -1], vec![0, 1, -1], vec![-1, -1, -1], vec![1, 0, 1], vec![0, 1, 1], vec![-1, -1, 1]];
    let mut cones = vec![vec![0, 1, 2], vec![3, 4, 5]];
    for i in 0..3 {
        let j = (i + 1) % 3;
        cones.push(vec![i, j, 3 + j]);
        cones.push(vec![i, 3 + j, 3 + i]);
    }
    Fan::new(3, rays, cones).expect("valid simplicial fan")
}

pub fn builtin_example(name: &str) -> Result<LvmbData, UnknownExample> {
    match name {
        "hopf" => Ok(hopf()),
        "calabi-eckmann" => Ok(calabi_eckmann()),
        "nonpolytopal-fan" => Ok(LvmbData::from_fan(nonpolytopal_fan(), vec![]).expect("no h vectors")),
        _ => name
            .strip_prefix("projective-space-")
            .and_then(|m| m.parse::<usize>().ok())
            .filter(|&m| m >= 1)
            .map(projective_space)
            .ok_or_else(|| UnknownExample(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fans::{is_complete, is_nonsingular};
    use crate::moment::{classify, Ambient, Verdict};

    #[test]
    fn names_resolve() {
        assert!(builtin_example("projective-space-2").is_ok());
        assert!(builtin_example("projective-space-0").is_err());
        assert!(builtin_example("projective-space-x").is_err());
        let e = builtin_example("torus").unwrap_err().to_string();
        assert!(e.contains("calabi-eckmann"), "{e}");
        match builtin_example("projective-space-2").unwrap().ambient {
            Ambient::Complex(s) => assert_eq!(s, SimplicialComplex::simplex_boundary(2)),
            Ambient::Fan(_) => unreachable!(),
        }
    }

    #[test]
    fn nonpolytopal_fixture_properties() {
        let f = nonpolytopal_fan();
        assert!(is_complete(&f));
        assert!(!is_nonsingular(&f));
        let r = classify(&builtin_example("nonpolytopal-fan").unwrap());
        assert_eq!(r.verdict, Verdict::LvmbNotLvm);
        let s = r.support.unwrap();
        assert!(s.t_star.is_zero());
        assert_eq!(s.obstruction_verified, Some(true));
    }
}
