use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::check::Setup;
use super::data::Ambient;
use crate::arith::{dot, to_f64_vec, RatMatrix, RatVector, Rational};
use crate::fans::{complex_ray_vertices, Cone, Fan};
use crate::polytope::{membership_violation, polytope_from_support, vertices, HPolytope, PolytopeError};

/// Rejection-sampling attempts per point before giving up.
pub const REJECTION_CAP: usize = 1_000_000;

/// Complex coordinates z_c of the space the moment map lives on.
///
/// With Σ on {0, …, m} and 0 indispensable these are z_1, …, z_m. If 0 is a
/// vertex of Σ, z_0 is appended (homogeneous coordinates, u_0 = −Σ e_i).
/// For a directly supplied fan there is one coordinate per ray.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chart {
    /// Vertex label of Σ (or ray index of Δ) for each coordinate.
    pub labels: Vec<usize>,
    /// Ray of Δ for each coordinate, if any.
    pub ray_of: Vec<Option<usize>>,
    /// Columns u_c ∈ ℤ^m; the torus of ℂ^C acts through e_c ↦ u_c.
    pub lambda: RatMatrix,
}

impl Chart {
    pub fn new(setup: &Setup) -> Self {
        let m = setup.data.m();
        match &setup.data.ambient {
            Ambient::Complex(sigma) => {
                let ray_vertices = complex_ray_vertices(sigma);
                let mut labels: Vec<usize> = (1..=m).collect();
                if !sigma.is_indispensable(0) {
                    labels.push(0);
                }
                let ray_of = labels.iter().map(|l| ray_vertices.iter().position(|v| v == l)).collect();
                let cols: Vec<RatVector> = labels
                    .iter()
                    .map(|&l| (1..=m).map(|j| Rational::from(if l == 0 { -1 } else { i64::from(j == l) })).collect())
                    .collect();
                Chart { labels, ray_of, lambda: RatMatrix::from_rows(m, cols).transpose() }
            }
            Ambient::Fan(f) => {
                let k = f.rays().len();
                let cols: Vec<RatVector> = (0..k).map(|i| f.ray_rat(i)).collect();
                Chart { labels: (0..k).collect(), ray_of: (0..k).map(Some).collect(), lambda: RatMatrix::from_rows(m, cols).transpose() }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The coordinates in `zero` may vanish together: they are all rays of
    /// Δ and span a cone of it.
    pub fn admits_zeros(&self, ambient: &Fan, zero: &[usize]) -> bool {
        let rays: Option<Vec<usize>> = zero.iter().map(|&c| self.ray_of[c]).collect();
        rays.is_some_and(|r| ambient.contains_cone(&Cone::new(r)))
    }
}

/// Φ(z) = (π|z_c|²)_c.
pub fn moment_map(z: &[Complex64]) -> Vec<f64> {
    z.iter().map(|w| PI * w.norm_sqr()).collect()
}

/// β_j = ⟨−a, K_j⟩ for the rows K_j of the level-subspace basis.
pub fn beta(level: &RatMatrix, a: &[Rational]) -> RatVector {
    level.row_vecs().iter().map(|k| -dot(k, a)).collect()
}

/// A point of 𝒵_P.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    pub index: usize,
    pub z: Vec<Complex64>,
    /// r = Φ(z).
    pub r: Vec<f64>,
    /// Coordinate positions with z_c = 0.
    pub zero_pattern: Vec<usize>,
    /// The α ∈ P the point was built from.
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SampleError {
    #[error("no point of P found for sample {index} after {cap} draws")]
    RejectionCap { index: usize, cap: usize },
    #[error("sample {index} vanishes on coordinates {zero_pattern:?}, which do not span a cone")]
    OutsideDomain { index: usize, zero_pattern: Vec<usize> },
    #[error("polytope: {0}")]
    Polytope(#[from] PolytopeError),
}

/// Everything needed to go between z, Φ(z) and P for an LVM classification.
#[derive(Debug, Clone)]
pub struct MomentModel {
    pub chart: Chart,
    pub ambient: Fan,
    pub qfan: Fan,
    pub polytope: HPolytope,
    pub vertices: Vec<(Cone, RatVector)>,
    /// Q = q · Λ, an `n × |C|` matrix.
    pub q_total: RatMatrix,
    /// Echelon basis of ker Q, the directions along which Φ is constant on 𝒵_P.
    pub level: RatMatrix,
    /// Per-coordinate offsets a_c; the gauge constant c of the lift.
    pub offsets: RatVector,
    /// Ray of q(Δ) through Q e_c, for coordinates over non-kernel rays of Δ.
    pub qray: Vec<Option<usize>>,
    lift_cols: Vec<usize>,
    /// B^{-T} for B = Q restricted to `lift_cols`.
    lift: RatMatrix,
    lift_f64: Vec<Vec<f64>>,
    q_total_f64: Vec<Vec<f64>>,
    offsets_f64: Vec<f64>,
}

impl MomentModel {
    /// `qfan_offsets` are the support offsets, one per ray of q(Δ).
    pub fn new(setup: &Setup, qfan_offsets: &[Rational]) -> Result<Self, PolytopeError> {
        let projection = setup.projection.as_ref().expect("q(Δ) is a fan");
        let qfan = projection.fan.clone();
        let polytope = polytope_from_support(&qfan, qfan_offsets)?;
        let vertices = vertices(&polytope, &qfan)?;
        let chart = Chart::new(setup);
        let q_total = setup.quotient.q.mul(&chart.lambda);
        let n = q_total.rows();
        let level = RatMatrix::from_rows(chart.len(), q_total.kernel_basis()).rref().matrix;

        let images: Vec<Option<(usize, usize)>> =
            chart.ray_of.iter().map(|ray| ray.and_then(|r| projection.ray_image[r].map(|j| (r, j)))).collect();
        let offsets: RatVector = (0..chart.len())
            .map(|c| {
                match images[c] {
                    Some((r, j)) => projection.ray_scale[r].as_ref().expect("scale of image ray") * &qfan_offsets[j],
                    None => {
                        // Not constrained by P: keep the coordinate strictly away from zero.
                        let u = q_total.column(c);
                        let low = vertices.iter().map(|(_, v)| dot(v, &u)).min().expect("P has a vertex");
                        low - Rational::one()
                    }
                }
            })
            .collect();

        let e = q_total.rref();
        let lift_cols = e.pivots;
        debug_assert_eq!(lift_cols.len(), n);
        let lift = q_total.select_columns(&lift_cols).transpose().inverse().expect("pivot columns are independent");
        Ok(MomentModel {
            lift_f64: lift.to_f64_rows(),
            q_total_f64: q_total.to_f64_rows(),
            offsets_f64: to_f64_vec(&offsets),
            chart,
            ambient: setup.ambient.clone(),
            qfan,
            polytope,
            vertices,
            q_total,
            level,
            offsets,
            qray: images.iter().map(|i| i.map(|(_, j)| j)).collect(),
            lift_cols,
            lift,
        })
    }

    pub fn n(&self) -> usize {
        self.q_total.rows()
    }

    pub fn beta(&self) -> RatVector {
        beta(&self.level, &self.offsets)
    }

    /// r_c = ⟨α, Q e_c⟩ − a_c, exactly.
    pub fn radii_exact(&self, alpha: &[Rational]) -> RatVector {
        let qa = self.q_total.transpose().mul_vec(alpha);
        qa.iter().zip(&self.offsets).map(|(x, a)| x - a).collect()
    }

    /// r_c = ⟨α, Q e_c⟩ − a_c in floating point, clamped at 0.
    pub fn radii(&self, alpha: &[f64]) -> Vec<f64> {
        (0..self.chart.len())
            .map(|c| {
                let s: f64 = (0..self.n()).map(|k| self.q_total_f64[k][c] * alpha[k]).sum();
                (s - self.offsets_f64[c]).max(0.0)
            })
            .collect()
    }

    /// Φ̃ from Φ(z) = r: the α with Qᵀα = r + a, read off the pivot columns.
    /// Returns α with the max-norm residual |Qᵀα − (r + a)|.
    pub fn lift(&self, r: &[f64]) -> (Vec<f64>, f64) {
        let n = self.n();
        let rhs: Vec<f64> = self.lift_cols.iter().map(|&c| r[c] + self.offsets_f64[c]).collect();
        let alpha: Vec<f64> = (0..n).map(|i| (0..n).map(|j| self.lift_f64[i][j] * rhs[j]).sum()).collect();
        let residual = (0..self.chart.len())
            .map(|c| {
                let s: f64 = (0..n).map(|k| self.q_total_f64[k][c] * alpha[k]).sum();
                (s - r[c] - self.offsets_f64[c]).abs()
            })
            .fold(0.0, f64::max);
        (alpha, residual)
    }

    /// Exact lift; `None` when r + a is not in the image of Qᵀ.
    pub fn lift_exact(&self, r: &[Rational]) -> Option<RatVector> {
        let rhs: RatVector = self.lift_cols.iter().map(|&c| &r[c] + &self.offsets[c]).collect();
        let alpha = self.lift.mul_vec(&rhs);
        let back = self.radii_exact(&alpha);
        (back == r).then_some(alpha)
    }

    /// max_j |⟨r, K_j⟩ − β_j|.
    pub fn level_residual(&self, r: &[f64]) -> f64 {
        let beta = to_f64_vec(&self.beta());
        self.level
            .row_vecs()
            .iter()
            .zip(beta)
            .map(|(k, b)| (k.iter().zip(r).map(|(x, y)| x.to_f64() * y).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }

    /// The point with |z_c|² = r_c/π over α and the given phases.
    pub fn point_at(&self, index: usize, alpha: &[f64], phases: &[f64]) -> SamplePoint {
        let radii = self.radii(alpha);
        let z: Vec<Complex64> =
            radii.iter().zip(phases).map(|(r, t)| Complex64::from_polar((r / PI).sqrt(), *t)).collect();
        let zero_pattern = (0..z.len()).filter(|&c| z[c] == Complex64::new(0.0, 0.0)).collect();
        SamplePoint { index, r: moment_map(&z), z, zero_pattern, alpha: alpha.to_vec() }
    }

    fn bounding_box(&self) -> Vec<(f64, f64)> {
        (0..self.n())
            .map(|k| {
                let xs = self.vertices.iter().map(|(_, v)| v[k].to_f64());
                let lo = xs.clone().fold(f64::INFINITY, f64::min);
                let hi = xs.fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            })
            .collect()
    }

    /// Sample `index` of the stream for `seed`; independent of other indices.
    pub fn sample_one(&self, seed: u64, index: usize) -> Result<SamplePoint, SampleError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        let bbox = self.bounding_box();
        let mut alpha = None;
        for _ in 0..REJECTION_CAP {
            let x: Vec<f64> = bbox.iter().map(|&(lo, hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo }).collect();
            if membership_violation(&self.polytope, &x) == 0.0 {
                alpha = Some(x);
                break;
            }
        }
        let alpha = alpha.ok_or(SampleError::RejectionCap { index, cap: REJECTION_CAP })?;
        let phases: Vec<f64> = (0..self.chart.len()).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let p = self.point_at(index, &alpha, &phases);
        if !self.chart.admits_zeros(&self.ambient, &p.zero_pattern) {
            return Err(SampleError::OutsideDomain { index, zero_pattern: p.zero_pattern });
        }
        Ok(p)
    }

    /// `count` seeded points of 𝒵_P, ordered by index.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<SamplePoint>, SampleError> {
        (0..count).map(|i| self.sample_one(seed, i)).collect()
    }
}
