//! Constructors for near-solutions: exact solutions plus controlled,
//! reproducible noise, and an empirical estimate of the smallest control
//! amplitude dominating a function's residual.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::Perturbation;
use crate::equation::{residual_probe, EquationParams, PolySolution, SampleFn};
use crate::error::{Error, Result};
use crate::pnorm::QuasiNormSpec;
use serde::{Deserialize, Serialize};

/// Envelope of the injected noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NoiseShape {
    /// Amplitude-bounded everywhere: `|e(x)| <= amplitude`.
    BoundedOscillation,
    /// Power envelope: `|e(x)| <= amplitude * ||x||^exponent`.
    ScaledPower { exponent: f64 },
}

/// Deterministic noise recipe. The oscillation depends on the input only
/// through the squared Euclidean norm, so the noise is even in x; residuals
/// of even functions vanish on the troublesome (0, y) pairs, which keeps
/// power-envelope controls satisfiable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub amplitude: f64,
    pub shape: NoiseShape,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise amplitude must be finite and >= 0, got {}",
                self.amplitude
            )));
        }
        if let NoiseShape::ScaledPower { exponent } = self.shape {
            if !(exponent > 0.0 && exponent.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "noise envelope exponent must be positive, got {exponent}"
                )));
            }
        }
        Ok(())
    }
}

/// Exact one-dimensional solution `a x^4 + b x^2` as a sample function into
/// the scalar l^p space.
pub fn make_exact(a: f64, b: f64, p: f64) -> Result<SampleFn> {
    PolySolution::new(a, b).sample_fn(p)
}

/// Adds reproducible noise to a base function. The oscillation frequencies
/// and the target-space direction are drawn once from the seed, so equal
/// specs produce bitwise-equal functions.
pub fn make_perturbed(base: &SampleFn, spec: &NoiseSpec) -> Result<SampleFn> {
    spec.validate()?;
    let target = base.target();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k1: f64 = rng.random_range(0.5..3.0);
    let k2: f64 = rng.random_range(0.5..3.0);
    let direction = unit_direction(&mut rng, &target)?;
    let amplitude = spec.amplitude;
    let shape = spec.shape;
    let inner = base.clone();
    let label = format!("{}+noise(seed={})", base.label(), spec.seed);
    SampleFn::new(base.domain_dim(), target, label, move |x| {
        let s: f64 = x.iter().map(|c| c * c).sum();
        let envelope = match shape {
            NoiseShape::BoundedOscillation => 1.0,
            NoiseShape::ScaledPower { exponent } => s.powf(exponent / 2.0),
        };
        let osc = (k1 * s + k2 * s * s).sin();
        let mut out = inner.value(x);
        for (o, d) in out.coords_mut().iter_mut().zip(direction.iter()) {
            *o += amplitude * envelope * osc * d;
        }
        out
    })
}

/// Random direction of unit quasi-norm in the target space.
fn unit_direction(rng: &mut ChaCha8Rng, target: &QuasiNormSpec) -> Result<Vec<f64>> {
    let mut v: Vec<f64>;
    loop {
        v = (0..target.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = target.norm(&crate::pnorm::YVector::new(v.clone()));
        if norm > 0.25 {
            // Quasi-norms are absolutely homogeneous, so scaling normalizes
            // exactly up to rounding.
            for c in &mut v {
                *c /= norm;
            }
            return Ok(v);
        }
    }
}

/// Smallest control amplitude whose shape dominates the residual on the
/// given pairs: `max ||residual(x, y)|| / shape(x, y)` with the shape
/// normalized to theta = 1. Pairs where the shape vanishes must have a
/// vanishing residual; otherwise no amplitude works and the offending pairs
/// are reported.
pub fn empirical_theta(
    f: &SampleFn,
    eq: &EquationParams,
    shape: &Perturbation,
    pairs: &[(Vec<f64>, Vec<f64>)],
) -> Result<f64> {
    shape.validate()?;
    let unit = shape.with_theta(1.0);
    let space = f.target();
    let mut worst: f64 = 0.0;
    let mut infeasible: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for (x, y) in pairs {
        let probe = residual_probe(f, eq, x, y)?;
        let control = unit.eval(x, y);
        if control > 0.0 {
            let ratio = probe.residual_norm(&space) / control;
            if ratio > worst {
                worst = ratio;
            }
        } else if !probe.within(&space, 1e-9) {
            infeasible.push((x.clone(), y.clone()));
        }
    }
    if !infeasible.is_empty() {
        return Err(Error::Infeasible { pairs: infeasible });
    }
    Ok(worst)
}
