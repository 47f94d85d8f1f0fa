//! p-normed target spaces.
//!
//! For 0 < p <= 1 the functional `(sum |v_i|^p)^{1/p}` on R^dim is a p-norm:
//! it is absolutely homogeneous and p-subadditive (`||v+w||^p <= ||v||^p +
//! ||w||^p`), but for p < 1 the plain triangle inequality fails and only the
//! quasi-triangle inequality `||v+w|| <= M (||v|| + ||w||)` survives, with
//! modulus of concavity `M = 2^{1/p - 1}`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rounding slack for inequality checks: floating-point evaluation of a true
/// inequality may land within a few ulps on the wrong side, never further.
pub fn ineq_slack(lhs: f64, rhs: f64) -> f64 {
    1e-12 * (1.0 + lhs.abs() + rhs.abs())
}

/// `lhs <= rhs` up to the shared rounding slack.
pub fn ineq_holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + ineq_slack(lhs, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuasiNormKind {
    /// Coordinate p-norm `(sum |v_i|^p)^{1/p}`.
    EllP,
}

/// A finite-dimensional real target space with its p-norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiNormSpec {
    pub dim: usize,
    pub p: f64,
    #[serde(default = "default_kind")]
    pub kind: QuasiNormKind,
}

fn default_kind() -> QuasiNormKind {
    QuasiNormKind::EllP
}

impl QuasiNormSpec {
    pub fn new(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("space dimension must be >= 1".into()));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p must lie in (0, 1], got {p}"
            )));
        }
        Ok(Self { dim, p, kind: QuasiNormKind::EllP })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.dim, self.p).map(|_| ())
    }

    /// `(sum |v_i|^p)^{1/p}`. The p = 1 path avoids `powf` so integer-valued
    /// coordinates produce exact sums.
    pub fn norm(&self, v: &YVector) -> f64 {
        debug_assert_eq!(v.dim(), self.dim);
        if self.p == 1.0 {
            return v.coords().iter().map(|c| c.abs()).sum();
        }
        let s: f64 = v.coords().iter().map(|c| c.abs().powf(self.p)).sum();
        s.powf(1.0 / self.p)
    }

    /// Analytic modulus of concavity `2^{1/p - 1}` of the quasi-triangle
    /// inequality for the l^p family.
    pub fn modulus_of_concavity(&self) -> f64 {
        (1.0 / self.p - 1.0).exp2()
    }

    pub fn zero(&self) -> YVector {
        YVector::zeros(self.dim)
    }
}

/// Element of the target space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YVector(Vec<f64>);

impl YVector {
    pub fn new(coords: Vec<f64>) -> Self {
        YVector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        YVector(vec![0.0; dim])
    }

    /// One-dimensional value, the common case for scalar sample functions.
    pub fn scalar(v: f64) -> Self {
        YVector(vec![v])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn add(&self, other: &YVector) -> YVector {
        debug_assert_eq!(self.dim(), other.dim());
        YVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &YVector) -> YVector {
        debug_assert_eq!(self.dim(), other.dim());
        YVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: f64) -> YVector {
        YVector(self.0.iter().map(|a| a * c).collect())
    }
}

impl From<Vec<f64>> for YVector {
    fn from(v: Vec<f64>) -> Self {
        YVector(v)
    }
}

/// Lemma check: for x_i >= 0 and 0 < p <= 1, `(sum x_i)^p <= sum x_i^p`.
/// Returns whether the inequality holds up to rounding slack; it is a theorem,
/// so a `false` means a broken input (negative entry, bad p) or a bug.
pub fn power_sum_check(xs: &[f64], p: f64) -> bool {
    if !(p > 0.0 && p <= 1.0) || xs.iter().any(|x| *x < 0.0) {
        return false;
    }
    let lhs = xs.iter().sum::<f64>().powf(p);
    let rhs: f64 = xs.iter().map(|x| x.powf(p)).sum();
    ineq_holds(lhs, rhs)
}

/// Brute-force estimate of the quasi-triangle modulus: the maximum of
/// `||v+w|| / (||v|| + ||w||)` over `samples` seeded random pairs plus a
/// deterministic seed set. The seed set contains the aligned pair (v, v),
/// where homogeneity pins the ratio to 1, and every disjoint axis pair
/// (e_i, e_j), where the ratio attains the analytic modulus exactly when
/// dim >= 2. The estimate never exceeds the analytic value.
pub fn estimate_modulus(spec: &QuasiNormSpec, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0_f64;
    let mut consider = |v: &YVector, w: &YVector| {
        let denom = spec.norm(v) + spec.norm(w);
        if denom > 0.0 {
            let ratio = spec.norm(&v.add(w)) / denom;
            if ratio > best {
                best = ratio;
            }
        }
    };

    let axis = |i: usize| {
        let mut c = vec![0.0; spec.dim];
        c[i] = 1.0;
        YVector::new(c)
    };
    for i in 0..spec.dim {
        for j in 0..spec.dim {
            let (ei, ej) = (axis(i), axis(j));
            consider(&ei, &ej);
        }
    }

    for _ in 0..samples {
        let v = YVector::new((0..spec.dim).map(|_| rng.random_range(-1.0..1.0)).collect());
        let w = YVector::new((0..spec.dim).map(|_| rng.random_range(-1.0..1.0)).collect());
        consider(&v, &w);
        consider(&v, &v);
    }
    best
}
