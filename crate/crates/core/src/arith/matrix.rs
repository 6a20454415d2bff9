use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{common_denominator, dot};
use super::{GaussianRational, Rational, RatVector};

/// Dense row-major matrix over ℚ.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("dimension mismatch: expected {expected}, got {got}")]
pub struct DimensionMismatch {
    pub expected: usize,
    pub got: usize,
}

/// Reduced row echelon form: nonzero rows only, leading entries 1,
/// pivot columns strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub matrix: RatMatrix,
    pub pivots: Vec<usize>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Build from rows; `cols` is needed to give a 0-row matrix its width.
    pub fn from_rows(cols: usize, rows: Vec<RatVector>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        RatMatrix { rows: n, cols, data }
    }

    pub fn from_i64_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            cols,
            rows.iter().map(|r| r.iter().map(|&x| Rational::from(x)).collect()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<RatVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> RatVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Rational]) -> RatVector {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> RatMatrix {
        let rows = (0..self.rows)
            .map(|i| cols.iter().map(|&j| self.get(i, j).clone()).collect())
            .collect();
        RatMatrix::from_rows(cols.len(), rows)
    }

    /// Stack `self` on top of `other`.
    pub fn vstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RatMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(Rational::to_f64).collect()).collect()
    }

    /// Fraction-free echelon form. Rows are first scaled to integers, then
    /// eliminated with Bareiss' exact-division update.
    fn bareiss(&self) -> (Vec<Vec<BigInt>>, Vec<usize>) {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = common_denominator(row);
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                    let (q, rem) = num.div_rem(&prev);
                    debug_assert!(rem.is_zero(), "Bareiss division not exact");
                    a[i][j] = q;
                }
                a[i][c] = BigInt::zero();
            }
            prev = a[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.bareiss().1.len()
    }

    /// Canonical reduced row echelon form (zero rows dropped).
    pub fn rref(&self) -> Echelon {
        let (ints, pivots) = self.bareiss();
        let mut rows: Vec<RatVector> = ints
            .into_iter()
            .map(|r| r.into_iter().map(Rational::from).collect())
            .collect();
        for k in (0..pivots.len()).rev() {
            let pc = pivots[k];
            let inv = rows[k][pc].recip();
            for x in rows[k].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = rows[k].clone();
            for row in rows.iter_mut().take(k) {
                let f = row[pc].clone();
                if f.is_zero() {
                    continue;
                }
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &(&f * y);
                }
            }
        }
        Echelon { matrix: RatMatrix::from_rows(self.cols, rows), pivots }
    }

    /// Basis of {x : M·x = 0}, one vector per free column in increasing order.
    pub fn kernel_basis(&self) -> Vec<RatVector> {
        let e = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|j| !e.pivots.contains(j)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Rational::zero(); self.cols];
                x[f] = Rational::one();
                for (k, &p) in e.pivots.iter().enumerate() {
                    x[p] = -e.matrix.get(k, f);
                }
                x
            })
            .collect()
    }

    /// Exact solution of M·x = b. Free variables are set to zero, so the
    /// returned representative is supported on the pivot columns.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<RatVector>, DimensionMismatch> {
        if b.len() != self.rows {
            return Err(DimensionMismatch { expected: self.rows, got: b.len() });
        }
        let aug = RatMatrix::from_rows(
            self.cols + 1,
            (0..self.rows)
                .map(|i| {
                    let mut r = self.row(i).to_vec();
                    r.push(b[i].clone());
                    r
                })
                .collect(),
        );
        let e = aug.rref();
        if e.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (k, &p) in e.pivots.iter().enumerate() {
            x[p] = e.matrix.get(k, self.cols).clone();
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(RatMatrix::zeros(0, 0));
        }
        let aug = RatMatrix::from_rows(
            2 * n,
            (0..n)
                .map(|i| {
                    let mut r = self.row(i).to_vec();
                    r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                    r
                })
                .collect(),
        );
        let e = aug.rref();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(e.matrix.select_columns(&cols))
    }

    pub fn determinant(&self) -> Option<Rational> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Rational::one());
        }
        // Bareiss on integer-scaled rows, undoing the scale at the end.
        let mut scale = Rational::one();
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let row = self.row(i);
                let l = common_denominator(row);
                scale *= &Rational::from(l.clone());
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        let mut sign = 1;
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Some(Rational::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Some(Rational::from(a[n - 1][n - 1].clone() * sign) / scale)
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.row_vecs().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<RatVector> = Vec::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(RatMatrix::from_rows(cols, rows))
    }
}

/// Canonical echelon basis of p(𝔥) = span_ℝ{Re a, Re(√−1·a)} for the
/// given complex basis vectors a.
pub fn real_projection_span(m: usize, basis: &[Vec<GaussianRational>]) -> RatMatrix {
    let mut rows = Vec::with_capacity(2 * basis.len());
    for a in basis {
        assert_eq!(a.len(), m, "basis vector length");
        rows.push(a.iter().map(|z| z.re.clone()).collect());
        rows.push(a.iter().map(|z| -&z.im).collect());
    }
    RatMatrix::from_rows(m, rows).rref().matrix
}

/// Diagonal of the Smith normal form of an integer matrix (nonzero entries,
/// nonnegative, each dividing the next).
pub fn elementary_divisors(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // Smallest nonzero entry in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let mut clean = true;
        for i in t + 1..nr {
            let q = a[i][t].div_floor(&a[t][t]);
            if !q.is_zero() {
                let (top, rest) = a.split_at_mut(i);
                for (x, y) in rest[0][t..].iter_mut().zip(&top[t][t..]) {
                    *x -= y * &q;
                }
            }
            if !a[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..nc {
            let q = a[t][j].div_floor(&a[t][t]);
            if !q.is_zero() {
                for row in a.iter_mut().skip(t) {
                    let v = &row[t] * &q;
                    row[j] -= v;
                }
            }
            if !a[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Pivot must divide the whole trailing block.
        let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
        if let Some(i) = bad {
            let (top, rest) = a.split_at_mut(i);
            for (x, y) in top[t][t..].iter_mut().zip(&rest[0][t..]) {
                *x += y;
            }
            continue;
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(cols: usize, rows: &[Vec<i64>]) -> RatMatrix {
        RatMatrix::from_i64_rows(cols, rows)
    }

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::identity(2).rank(), 2);
        assert_eq!(RatMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(m(4, &[vec![1, 1, 0, 0], vec![0, 0, 1, 1], vec![1, 1, 1, 1]]).rank(), 2);
    }

    #[test]
    fn kernel_examples() {
        assert!(RatMatrix::identity(3).kernel_basis().is_empty());
        let row = m(4, &[vec![1, 1, 0, 0]]);
        let k = row.kernel_basis();
        assert_eq!(k.len(), 3);
        for v in &k {
            assert!(row.mul_vec(v).iter().all(Rational::is_zero));
        }
        assert_eq!(RatMatrix::from_rows(4, k).rank(), 3);
        let z = RatMatrix::zeros(2, 2).kernel_basis();
        assert_eq!(RatMatrix::from_rows(2, z).rank(), 2);
    }

    #[test]
    fn solve_examples() {
        let x = RatMatrix::identity(2).solve(&[r(3, 1), r(-1, 2)]).unwrap().unwrap();
        assert_eq!(x, vec![r(3, 1), r(-1, 2)]);
        let x = m(2, &[vec![1, 1]]).solve(&[r(2, 1)]).unwrap().unwrap();
        assert_eq!(x, vec![r(2, 1), r(0, 1)]);
        assert_eq!(m(2, &[vec![1, 0], vec![1, 0]]).solve(&[r(1, 1), r(2, 1)]).unwrap(), None);
        assert!(RatMatrix::identity(2).solve(&[r(1, 1)]).is_err());
    }

    #[test]
    fn rref_is_canonical() {
        let a = m(3, &[vec![2, 4, 6], vec![1, 1, 1]]);
        let b = m(3, &[vec![3, 5, 7], vec![0, 2, 4]]);
        assert_eq!(a.rref(), b.rref());
        let e = a.rref();
        assert_eq!(e.pivots, vec![0, 1]);
        assert_eq!(e.matrix.row(0), &[r(1, 1), r(0, 1), r(-1, 1)]);
    }

    #[test]
    fn inverse_and_determinant() {
        let a = m(2, &[vec![2, 1], vec![1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RatMatrix::identity(2));
        assert_eq!(a.determinant().unwrap(), r(1, 1));
        let s = m(2, &[vec![1, 2], vec![2, 4]]);
        assert!(s.inverse().is_none());
        assert_eq!(s.determinant().unwrap(), r(0, 1));
        let f = RatMatrix::from_rows(2, vec![vec![r(1, 2), r(0, 1)], vec![r(0, 1), r(-1, 3)]]);
        assert_eq!(f.determinant().unwrap(), r(-1, 6));
        let p = m(3, &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 5]]);
        assert_eq!(p.determinant().unwrap(), r(-5, 1));
    }

    #[test]
    fn projection_span_examples() {
        let one = GaussianRational::real(1);
        let i = GaussianRational::i();
        let p = real_projection_span(4, &[vec![one.clone(), one.clone(), i.clone(), i.clone()]]);
        assert_eq!(p, m(4, &[vec![1, 1, 0, 0], vec![0, 0, 1, 1]]));
        assert_eq!(real_projection_span(3, &[]).rows(), 0);
        let zero = GaussianRational::zero();
        let p = real_projection_span(2, &[vec![one, zero.clone()], vec![i, zero]]);
        assert_eq!(p, m(2, &[vec![1, 0]]));
    }

    #[test]
    fn smith_divisors() {
        let b = |rows: &[Vec<i64>]| -> Vec<Vec<BigInt>> {
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
        };
        let d = elementary_divisors(&b(&[vec![1, 0], vec![1, 2]]));
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(2)]);
        let d = elementary_divisors(&b(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(6)]);
        let d = elementary_divisors(&b(&[vec![1, 0, 0], vec![0, 1, 0]]));
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(1)]);
        let d = elementary_divisors(&b(&[vec![1, 0, -1], vec![1, 0, 1], vec![0, 1, 1]]));
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(1), BigInt::from(2)]);
    }
}
