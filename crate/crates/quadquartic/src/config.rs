//! Run configuration: one JSON document drives every command. Every field
//! has a default, so `{}` is a valid configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundFlavor, BoundParams, IterBudget, Perturbation, PerturbationKind};
use crate::equation::{EquationParams, FormSolution, SampleFn};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::hyers::{Component, Direction};
use crate::perturb::{empirical_theta, make_exact, make_perturbed, NoiseShape, NoiseSpec};
use crate::pnorm::QuasiNormSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquationSection {
    pub n: i64,
}

impl Default for EquationSection {
    fn default() -> Self {
        Self { n: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceSection {
    pub dim: usize,
    pub p: f64,
}

impl Default for SpaceSection {
    fn default() -> Self {
        Self { dim: 1, p: 1.0 }
    }
}

fn default_noise_shape() -> NoiseShape {
    NoiseShape::BoundedOscillation
}

/// The function under study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FunctionSection {
    /// a x^4 + b x^2 on a one-dimensional domain.
    Exact { a: f64, b: f64 },
    /// Exact bilinear/quartic diagonal forms on a multi-dimensional domain.
    Form {
        bilinear: Vec<Vec<Vec<f64>>>,
        quartic: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
    },
    /// Exact polynomial solution plus seeded bounded noise.
    Perturbed {
        a: f64,
        b: f64,
        amplitude: f64,
        #[serde(default = "default_noise_shape")]
        shape: NoiseShape,
        #[serde(default)]
        seed: u64,
    },
    /// Named test functions: "zero" or "cubic".
    Builtin { name: String },
}

impl Default for FunctionSection {
    fn default() -> Self {
        FunctionSection::Exact { a: 1.0, b: 1.0 }
    }
}

/// Control function for bounds and certification. `fit` derives theta
/// empirically from the function's residual on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSection {
    pub kind: PerturbationKind,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub fit: bool,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub s: f64,
}

impl Default for ControlSection {
    fn default() -> Self {
        Self { kind: PerturbationKind::Constant, theta: None, fit: true, r: 0.0, s: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionChoice {
    Auto,
    Shrink,
    Grow,
}

impl Default for DirectionChoice {
    fn default() -> Self {
        DirectionChoice::Auto
    }
}

impl DirectionChoice {
    pub fn resolve(self) -> Option<Direction> {
        match self {
            DirectionChoice::Auto => None,
            DirectionChoice::Shrink => Some(Direction::Shrink),
            DirectionChoice::Grow => Some(Direction::Grow),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationSection {
    pub m_max: usize,
    pub tol: f64,
    #[serde(default)]
    pub direction: DirectionChoice,
}

impl Default for IterationSection {
    fn default() -> Self {
        Self { m_max: 24, tol: 1e-10, direction: DirectionChoice::Auto }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsSection {
    /// Modulus of concavity; omitted means the analytic value 2^{1/p-1}.
    #[serde(default)]
    pub modulus: Option<f64>,
    pub truncation: usize,
    pub exponent_quadratic: u32,
    pub exponent_quartic: u32,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self { modulus: None, truncation: 64, exponent_quadratic: 8, exponent_quartic: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifySection {
    pub flavor: BoundFlavor,
}

impl Default for CertifySection {
    fn default() -> Self {
        Self { flavor: BoundFlavor::Mixed }
    }
}

fn default_tolerance() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub equation: EquationSection,
    #[serde(default)]
    pub space: SpaceSection,
    #[serde(default)]
    pub function: FunctionSection,
    #[serde(default)]
    pub control: ControlSection,
    #[serde(default)]
    pub iteration: IterationSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub certify: CertifySection,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            equation: EquationSection::default(),
            space: SpaceSection::default(),
            function: FunctionSection::default(),
            control: ControlSection::default(),
            iteration: IterationSection::default(),
            bounds: BoundsSection::default(),
            grid: GridSpec::default(),
            certify: CertifySection::default(),
            tolerance: default_tolerance(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("invalid configuration: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read configuration {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.eq()?;
        self.space()?;
        self.grid.validate()?;
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "tolerance must be finite and positive, got {}",
                self.tolerance
            )));
        }
        if self.iteration.m_max == 0 || self.iteration.m_max > 1000 {
            return Err(Error::Config(format!(
                "iteration m_max must lie in 1..=1000, got {}",
                self.iteration.m_max
            )));
        }
        if !(self.iteration.tol > 0.0 && self.iteration.tol.is_finite()) {
            return Err(Error::Config(format!(
                "iteration tol must be finite and positive, got {}",
                self.iteration.tol
            )));
        }
        Ok(())
    }

    pub fn eq(&self) -> Result<EquationParams> {
        EquationParams::new(self.equation.n)
    }

    pub fn space(&self) -> Result<QuasiNormSpec> {
        QuasiNormSpec::new(self.space.dim, self.space.p)
    }

    pub fn iter_budget(&self) -> IterBudget {
        IterBudget { m_max: self.iteration.m_max, tol: self.iteration.tol }
    }

    pub fn bound_params(&self) -> Result<BoundParams> {
        let mut bp = BoundParams::new(self.equation.n, self.space.p)?;
        if let Some(m) = self.bounds.modulus {
            bp.modulus = m;
        }
        bp.truncation = self.bounds.truncation;
        bp.exponent_quadratic = self.bounds.exponent_quadratic;
        bp.exponent_quartic = self.bounds.exponent_quartic;
        bp.validate()?;
        Ok(bp)
    }

    /// Build the configured function. Its target dimension must match the
    /// space section.
    pub fn build_function(&self) -> Result<SampleFn> {
        let space = self.space()?;
        let f = match &self.function {
            FunctionSection::Exact { a, b } => make_exact(*a, *b, space.p)?,
            FunctionSection::Form { bilinear, quartic } => {
                FormSolution::new(bilinear.clone(), quartic.clone())?.sample_fn(space.p)?
            }
            FunctionSection::Perturbed { a, b, amplitude, shape, seed } => {
                let base = make_exact(*a, *b, space.p)?;
                make_perturbed(
                    &base,
                    &NoiseSpec { amplitude: *amplitude, shape: *shape, seed: *seed },
                )?
            }
            FunctionSection::Builtin { name } => match name.as_str() {
                "zero" => SampleFn::scalar(space.p, "zero", |_| 0.0)?,
                "cubic" => SampleFn::scalar(space.p, "cubic", |x| x * x * x)?,
                other => {
                    return Err(Error::Config(format!(
                        "unknown builtin function {other:?}; known: zero, cubic"
                    )))
                }
            },
        };
        if f.target().dim != space.dim {
            return Err(Error::Config(format!(
                "function targets dimension {} but the space section says {}",
                f.target().dim,
                space.dim
            )));
        }
        Ok(f)
    }

    /// The control function, fitting theta from the residual when asked.
    pub fn resolve_control(&self, f: &SampleFn) -> Result<Perturbation> {
        let c = &self.control;
        let shape = match c.kind {
            PerturbationKind::Constant => Perturbation::constant(1.0),
            PerturbationKind::PowerX => Perturbation::power_x(1.0, c.r),
            PerturbationKind::PowerY => Perturbation::power_y(1.0, c.s),
            PerturbationKind::PowerSum => Perturbation::power_sum(1.0, c.r, c.s),
            PerturbationKind::PowerProduct => Perturbation::power_product(1.0, c.r, c.s),
        };
        shape.validate()?;
        let theta = match (c.fit, c.theta) {
            (true, _) => {
                let pairs = self.grid.axis_pairs(f.domain_dim())?;
                empirical_theta(f, &self.eq()?, &shape, &pairs)?
            }
            (false, Some(t)) => t,
            (false, None) => {
                return Err(Error::Config(
                    "control needs either an explicit theta or fit = true".into(),
                ))
            }
        };
        Ok(shape.with_theta(theta))
    }

    pub fn direction(&self) -> Option<Direction> {
        self.iteration.direction.resolve()
    }

    /// Component matching the certification flavor, when it is not mixed.
    pub fn flavor_component(&self) -> Option<Component> {
        match self.certify.flavor {
            BoundFlavor::Quadratic => Some(Component::Quadratic),
            BoundFlavor::Quartic => Some(Component::Quartic),
            BoundFlavor::Mixed => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_json_is_a_full_default_config() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.equation.n, 2);
        assert_eq!(cfg.space.p, 1.0);
        assert_eq!(cfg.grid.count, 21);
        assert_eq!(cfg.certify.flavor, BoundFlavor::Mixed);
        assert!(cfg.control.fit);
        let f = cfg.build_function().unwrap();
        assert_eq!(f.eval(&[1.0]).unwrap().coords(), &[2.0]);
    }

    #[test]
    fn sections_round_trip() {
        let text = r#"{
            "equation": {"n": 3},
            "space": {"dim": 1, "p": 0.5},
            "function": {"kind": "perturbed", "a": 1.0, "b": -2.0, "amplitude": 1e-4, "seed": 3},
            "control": {"kind": "power_sum", "theta": 0.25, "fit": false, "r": 1.0, "s": 1.0},
            "iteration": {"m_max": 30, "tol": 1e-11, "direction": "grow"},
            "bounds": {"truncation": 80, "exponent_quadratic": 8, "exponent_quartic": 11},
            "grid": {"min": -1.0, "max": 1.0, "count": 9, "dyadic": true, "denom_pow": 3},
            "certify": {"flavor": "quartic"},
            "tolerance": 1e-8
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.equation.n, 3);
        assert_eq!(cfg.direction(), Some(Direction::Grow));
        let bp = cfg.bound_params().unwrap();
        assert_eq!(bp.truncation, 80);
        assert_eq!(bp.exponent_quartic, 11);
        assert_eq!(bp.modulus, 2.0);
        let f = cfg.build_function().unwrap();
        let phi = cfg.resolve_control(&f).unwrap();
        assert_eq!(phi.theta, 0.25);
        let round = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_json(&round).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(RunConfig::from_json("{\"equation\": {\"n\": 1}}").is_err());
        assert!(RunConfig::from_json("{\"space\": {\"dim\": 1, \"p\": 1.5}}").is_err());
        assert!(RunConfig::from_json("not json").is_err());
        let cfg = RunConfig::from_json(
            "{\"function\": {\"kind\": \"builtin\", \"name\": \"nope\"}}",
        )
        .unwrap();
        assert!(cfg.build_function().is_err());
        let cfg = RunConfig::from_json(
            "{\"control\": {\"kind\": \"constant\", \"fit\": false}}",
        )
        .unwrap();
        let f = cfg.build_function().unwrap();
        assert!(cfg.resolve_control(&f).is_err());
    }

    #[test]
    fn fitted_control_dominates_residual() {
        let text = r#"{
            "function": {"kind": "perturbed", "a": 1.0, "b": 1.0, "amplitude": 1e-5, "seed": 9},
            "control": {"kind": "constant", "fit": true}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        let f = cfg.build_function().unwrap();
        let phi = cfg.resolve_control(&f).unwrap();
        assert!(phi.theta > 0.0 && phi.theta < 80.0 * 1e-5, "theta {}", phi.theta);
    }

    #[test]
    fn form_function_checks_space_dim() {
        let text = r#"{
            "space": {"dim": 1, "p": 1.0},
            "function": {"kind": "form",
                "bilinear": [[[1.0, 0.0], [0.0, 1.0]], [[0.0, 0.0], [0.0, 0.0]]],
                "quartic": [
                    [[[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]],[[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]],
                    [[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]],[[[0.0,0.0],[0.0,0.0]],[[0.0,0.0],[0.0,0.0]]]]
                ]
            }
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        // Two target coordinates vs space.dim = 1.
        assert!(cfg.build_function().is_err());
    }
}
