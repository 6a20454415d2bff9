use lvmb::arith::{dot, RatMatrix, RatVector, Rational};
use lvmb::examples::{calabi_eckmann, hopf, projective_space};
use lvmb::lp::{solve, verify_certificate, LpProblem, LpStatus, Sense};
use lvmb::moment::{classify, classify_setup, LvmbData, MomentModel, Setup, Verdict};
use proptest::prelude::*;

fn r(x: i64) -> Rational {
    Rational::from(x)
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(m, n)| (Just(n), prop::collection::vec(prop::collection::vec(-4i64..=4, n), m)))
}

/// Laplace expansion along the first row.
fn cofactor_det(a: &[Vec<Rational>]) -> Rational {
    if a.is_empty() {
        return r(1);
    }
    let n = a.len();
    let mut total = r(0);
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> =
            a[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect()).collect();
        let term = &a[0][j] * &cofactor_det(&minor);
        if j % 2 == 0 {
            total += &term;
        } else {
            total -= &term;
        }
    }
    total
}

fn model(data: &LvmbData, offsets: &[Rational]) -> MomentModel {
    MomentModel::new(&Setup::new(data), offsets).expect("valid offsets")
}

fn support_offsets(data: &LvmbData) -> RatVector {
    classify(data).offsets().expect("LVM").clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity_is_column_count((cols, rows) in matrix(5, 5)) {
        let m = RatMatrix::from_i64_rows(cols, &rows);
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        for k in &kernel {
            prop_assert!(m.mul_vec(k).iter().all(Rational::is_zero));
        }
        prop_assert_eq!(RatMatrix::from_rows(cols, kernel).rank(), cols - m.rank());
    }

    #[test]
    fn solve_recovers_exact_preimage((cols, rows) in matrix(5, 4), x in prop::collection::vec(-6i64..=6, 4)) {
        let m = RatMatrix::from_i64_rows(cols, &rows);
        let x: RatVector = x[..cols].iter().map(|&v| r(v)).collect();
        let b = m.mul_vec(&x);
        let y = m.solve(&b).unwrap().expect("b is in the image");
        prop_assert_eq!(m.mul_vec(&y), b);
    }

    #[test]
    fn determinant_matches_cofactor_expansion(n in 1usize..=4, entries in prop::collection::vec(-5i64..=5, 16)) {
        let rows: Vec<Vec<i64>> = (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
        let m = RatMatrix::from_i64_rows(n, &rows);
        let oracle = cofactor_det(&m.row_vecs());
        prop_assert_eq!(m.determinant(), Some(oracle.clone()));
        match m.inverse() {
            Some(inv) => {
                prop_assert!(!oracle.is_zero());
                prop_assert_eq!(m.mul(&inv), RatMatrix::identity(n));
            }
            None => prop_assert!(oracle.is_zero()),
        }
    }

    #[test]
    fn lp_certificates_verify(
        nv in 1usize..=4,
        rows in prop::collection::vec((prop::collection::vec(-3i64..=3, 4), -4i64..=4, any::<bool>()), 0..=7),
        obj in prop::collection::vec(-3i64..=3, 4),
        maximize in any::<bool>(),
    ) {
        let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
        let mut p = LpProblem::new(nv, sense, obj[..nv].iter().map(|&v| r(v)).collect());
        for (a, b, eq) in rows {
            let a: RatVector = a[..nv].iter().map(|&v| r(v)).collect();
            if eq { p.add_eq(a, r(b)) } else { p.add_ge(a, r(b)) }
        }
        let c = solve(&p);
        prop_assert!(verify_certificate(&p, &c).is_ok(), "{:?}", c);
        if c.status == LpStatus::Optimal {
            let x = c.primal.as_ref().unwrap();
            prop_assert_eq!(p.objective_value(x), c.value.clone().unwrap());
        }
    }

    #[test]
    fn classification_ignores_relabelling(which in 0usize..4, seed in any::<u64>()) {
        let data = match which {
            0 => calabi_eckmann(),
            1 => hopf(),
            2 => projective_space(2),
            _ => projective_space(3),
        };
        let m = data.m();
        let mut perm: Vec<usize> = (1..=m).collect();
        let mut s = seed;
        for i in (1..m).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = classify(&data);
        let b = classify(&data.relabel(&perm));
        prop_assert_eq!(a.verdict, b.verdict);
        let (pa, pb) = (a.polytope().unwrap(), b.polytope().unwrap());
        prop_assert_eq!(pa.dim, pb.dim);
        prop_assert_eq!(pa.len(), pb.len());
    }

    /// Shifting every support offset by ⟨c, u_j⟩ translates P by c and the
    /// moment data along with it.
    #[test]
    fn translating_offsets_translates_everything(
        which in 0usize..3,
        c in prop::collection::vec((-5i64..=5, 1i64..=3), 2),
        alpha in prop::collection::vec((-5i64..=5, 1i64..=4), 2),
    ) {
        let data = match which {
            0 => projective_space(2),
            1 => calabi_eckmann(),
            _ => hopf(),
        };
        let base = support_offsets(&data);
        let m0 = model(&data, &base);
        let n = m0.n();
        let c: RatVector = c[..n].iter().map(|&(p, q)| Rational::new(p, q)).collect();
        let shifted: RatVector = (0..base.len()).map(|j| &base[j] + &dot(&c, &m0.qfan.ray_rat(j))).collect();
        let m1 = model(&data, &shifted);

        let mut v0: Vec<RatVector> = m0.vertices.iter().map(|(_, v)| v.iter().zip(&c).map(|(x, y)| x + y).collect()).collect();
        let mut v1: Vec<RatVector> = m1.vertices.iter().map(|(_, v)| v.clone()).collect();
        v0.sort();
        v1.sort();
        prop_assert_eq!(v0, v1);

        let alpha: RatVector = alpha[..n].iter().map(|&(p, q)| Rational::new(p, q)).collect();
        let moved: RatVector = alpha.iter().zip(&c).map(|(x, y)| x + y).collect();
        let radii = m0.radii_exact(&alpha);
        prop_assert_eq!(&m1.radii_exact(&moved), &radii);
        prop_assert_eq!(m0.lift_exact(&radii), Some(alpha));
        prop_assert_eq!(m1.lift_exact(&radii), Some(moved));
    }
}

#[test]
fn setup_and_report_agree() {
    for data in [projective_space(2), calabi_eckmann(), hopf()] {
        let setup = Setup::new(&data);
        assert_eq!(classify_setup(&setup).verdict, Verdict::Lvm);
    }
}
