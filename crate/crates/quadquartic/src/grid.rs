//! Evaluation grids. Default: 21 points spanning [-2, 2], snapped to
//! dyadic rationals so that doubling and halving a grid point stays exact
//! in floating point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_min() -> f64 {
    -2.0
}

fn default_max() -> f64 {
    2.0
}

fn default_count() -> usize {
    21
}

fn default_dyadic() -> bool {
    true
}

fn default_denom_pow() -> u32 {
    4
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default = "default_min")]
    pub min: f64,
    #[serde(default = "default_max")]
    pub max: f64,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Snap each uniform point to the nearest multiple of 2^-denom_pow.
    #[serde(default = "default_dyadic")]
    pub dyadic: bool,
    #[serde(default = "default_denom_pow")]
    pub denom_pow: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            min: default_min(),
            max: default_max(),
            count: default_count(),
            dyadic: default_dyadic(),
            denom_pow: default_denom_pow(),
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::InvalidParameter(format!(
                "grid needs finite min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.count < 2 || self.count > 10_000 {
            return Err(Error::InvalidParameter(format!(
                "grid count must lie in 2..=10000, got {}",
                self.count
            )));
        }
        if self.denom_pow > 40 {
            return Err(Error::InvalidParameter(format!(
                "grid denominator power must be <= 40, got {}",
                self.denom_pow
            )));
        }
        Ok(())
    }

    /// Scalar grid points, strictly increasing. With snapping enabled the
    /// spacing must be coarse enough that no two points collide.
    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let step = (self.max - self.min) / (self.count - 1) as f64;
        let denom = (self.denom_pow as f64).exp2();
        let pts: Vec<f64> = (0..self.count)
            .map(|k| {
                let x = self.min + step * k as f64;
                if self.dyadic {
                    (x * denom).round() / denom
                } else {
                    x
                }
            })
            .collect();
        for w in pts.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidParameter(format!(
                    "grid snapping to multiples of 2^-{} collapses neighbors near {}; \
                     use a finer denominator or fewer points",
                    self.denom_pow, w[0]
                )));
            }
        }
        Ok(pts)
    }

    /// Grid points embedded along the first axis of a dim-dimensional
    /// domain.
    pub fn axis_points(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        if dim == 0 {
            return Err(Error::InvalidParameter("domain dimension must be >= 1".into()));
        }
        Ok(self
            .points()?
            .into_iter()
            .map(|x| {
                let mut v = vec![0.0; dim];
                v[0] = x;
                v
            })
            .collect())
    }

    /// All ordered pairs of grid points (x, y), embedded like
    /// `axis_points`.
    pub fn axis_pairs(&self, dim: usize) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        let pts = self.axis_points(dim)?;
        let mut out = Vec::with_capacity(pts.len() * pts.len());
        for x in &pts {
            for y in &pts {
                out.push((x.clone(), y.clone()));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let pts = GridSpec::default().points().unwrap();
        assert_eq!(pts.len(), 21);
        assert_eq!(pts[0], -2.0);
        assert_eq!(pts[20], 2.0);
        assert_eq!(pts[10], 0.0);
        for (a, b) in pts.iter().zip(pts.iter().rev()) {
            assert_eq!(*a, -*b, "grid must be symmetric about zero");
        }
        for &x in &pts {
            let scaled = x * 16.0;
            assert_eq!(scaled, scaled.round(), "{x} is not a multiple of 1/16");
        }
        let mut sorted = pts.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        assert_eq!(sorted.len(), 21);
    }

    #[test]
    fn doubling_grid_points_is_exact() {
        for &x in &GridSpec::default().points().unwrap() {
            // Dyadic points double and halve without rounding.
            assert_eq!(x + x, 2.0 * x);
            assert_eq!((x / 2.0) * 2.0, x);
        }
    }

    #[test]
    fn snapping_collision_is_reported() {
        let g = GridSpec { count: 100, denom_pow: 1, ..GridSpec::default() };
        assert!(g.points().is_err());
    }

    #[test]
    fn non_dyadic_grid_is_uniform() {
        let g = GridSpec { dyadic: false, count: 5, min: 0.0, max: 1.0, denom_pow: 4 };
        let pts = g.points().unwrap();
        assert_eq!(pts, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn pairs_cover_the_square() {
        let g = GridSpec { count: 3, ..GridSpec::default() };
        let pairs = g.axis_pairs(2).unwrap();
        assert_eq!(pairs.len(), 9);
        assert!(pairs.iter().all(|(x, y)| x.len() == 2 && y.len() == 2 && x[1] == 0.0 && y[1] == 0.0));
    }
}
