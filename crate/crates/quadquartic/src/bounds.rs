//! Perturbation controls and certified stability bounds.
//!
//! A control function phi(x, y) dominates the equation residual of a
//! near-solution. A fixed 17-term combination of phi evaluations along the
//! ray of a point budgets one doubling step of the part transforms; summing
//! those budgets over the dyadic orbit of the point (shrinking or growing)
//! yields the series that bounds the distance from the part transform to its
//! approximant limit:
//!
//! ```text
//! quadratic:  ||g(x) - Q0(x)||  <=  (M^e / 4)  * series_q(x)^{1/p}
//! quartic:    ||h(x) - T0(x)||  <=  (M^e / 16) * series_t(x)^{1/p}
//! mixed:      ||f(x) - Q(x) - T(x)||  <=  (M^{e+1} / 192) * (4 series_q^{1/p} + series_t^{1/p})
//! ```
//!
//! For power-law controls the series is geometric and collapses to a closed
//! form; `certify` runs the whole pipeline on a grid and reports whether the
//! premise and the conclusion both hold numerically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equation::{residual_probe, EquationParams, SampleFn};
use crate::error::{Error, Result};
use crate::hyers::{approximant, Component, Direction, IterationConfig};
use crate::pnorm::ineq_holds;

/// Euclidean norm on the domain.
pub fn domain_norm(x: &[f64]) -> f64 {
    if x.len() == 1 {
        return x[0].abs();
    }
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    Constant,
    PowerX,
    PowerY,
    PowerSum,
    PowerProduct,
}

/// Control function phi(x, y) over domain pairs, one of five power-law
/// shapes. Exponents r and s act on ||x|| and ||y|| respectively; unused
/// exponents are kept at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub kind: PerturbationKind,
    pub theta: f64,
    #[serde(default)]
    pub r: f64,
    #[serde(default)]
    pub s: f64,
}

impl Perturbation {
    pub fn constant(theta: f64) -> Self {
        Self { kind: PerturbationKind::Constant, theta, r: 0.0, s: 0.0 }
    }

    pub fn power_x(theta: f64, r: f64) -> Self {
        Self { kind: PerturbationKind::PowerX, theta, r, s: 0.0 }
    }

    pub fn power_y(theta: f64, s: f64) -> Self {
        Self { kind: PerturbationKind::PowerY, theta, r: 0.0, s }
    }

    pub fn power_sum(theta: f64, r: f64, s: f64) -> Self {
        Self { kind: PerturbationKind::PowerSum, theta, r, s }
    }

    pub fn power_product(theta: f64, r: f64, s: f64) -> Self {
        Self { kind: PerturbationKind::PowerProduct, theta, r, s }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "control amplitude theta must be finite and >= 0, got {}",
                self.theta
            )));
        }
        let positive = |v: f64, name: &str| -> Result<()> {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "control exponent {name} must be positive, got {v}"
                )));
            }
            Ok(())
        };
        match self.kind {
            PerturbationKind::Constant => Ok(()),
            PerturbationKind::PowerX => positive(self.r, "r"),
            PerturbationKind::PowerY => positive(self.s, "s"),
            PerturbationKind::PowerSum | PerturbationKind::PowerProduct => {
                positive(self.r, "r")?;
                positive(self.s, "s")
            }
        }
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        let mut p = *self;
        p.theta = theta;
        p
    }

    /// Evaluation from precomputed argument norms. `0^e = 0` for e > 0; the
    /// constant kind is the only path where an argument norm of zero still
    /// contributes (as theta).
    pub fn eval_norms(&self, nx: f64, ny: f64) -> f64 {
        match self.kind {
            PerturbationKind::Constant => self.theta,
            PerturbationKind::PowerX => self.theta * nx.powf(self.r),
            PerturbationKind::PowerY => self.theta * ny.powf(self.s),
            PerturbationKind::PowerSum => self.theta * (nx.powf(self.r) + ny.powf(self.s)),
            PerturbationKind::PowerProduct => self.theta * nx.powf(self.r) * ny.powf(self.s),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.eval_norms(domain_norm(x), domain_norm(y))
    }

    /// Monomial pieces (x-exponent, y-exponent); the sum kind has two.
    fn monomials(&self) -> Vec<(f64, f64)> {
        match self.kind {
            PerturbationKind::Constant => vec![(0.0, 0.0)],
            PerturbationKind::PowerX => vec![(self.r, 0.0)],
            PerturbationKind::PowerY => vec![(0.0, self.s)],
            PerturbationKind::PowerSum => vec![(self.r, 0.0), (0.0, self.s)],
            PerturbationKind::PowerProduct => vec![(self.r, self.s)],
        }
    }

    /// Degree under joint rescaling of both arguments, when the control is
    /// homogeneous along rays. The sum kind with r != s is not.
    fn ray_degree(&self) -> Option<f64> {
        match self.kind {
            PerturbationKind::Constant => Some(0.0),
            PerturbationKind::PowerX => Some(self.r),
            PerturbationKind::PowerY => Some(self.s),
            PerturbationKind::PowerProduct => Some(self.r + self.s),
            PerturbationKind::PowerSum => (self.r == self.s).then_some(self.r),
        }
    }
}

fn default_truncation() -> usize {
    64
}

fn default_exponent() -> u32 {
    8
}

/// One reading of the modulus exponent in the theorem bounds. The proof
/// chain supports 8; one printed statement carries 11, so reports quote the
/// bound at this exponent as well.
pub const ALT_MODULUS_EXPONENT: u32 = 11;

/// Everything the bounds need besides the control: equation scale, target
/// space exponent, modulus of concavity, series truncation budget, and the
/// modulus exponents of the two component bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub n: i64,
    pub p: f64,
    /// Modulus of concavity of the target space. The analytic value for an
    /// l^p space is 2^{1/p-1}; a larger value only loosens the bounds.
    pub modulus: f64,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default = "default_exponent")]
    pub exponent_quadratic: u32,
    #[serde(default = "default_exponent")]
    pub exponent_quartic: u32,
}

impl BoundParams {
    /// Analytic modulus for the given space exponent.
    pub fn new(n: i64, p: f64) -> Result<Self> {
        EquationParams::new(n)?;
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
        }
        Ok(Self {
            n,
            p,
            modulus: (1.0 / p - 1.0).exp2(),
            truncation: default_truncation(),
            exponent_quadratic: default_exponent(),
            exponent_quartic: default_exponent(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        EquationParams::new(self.n)?;
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {}", self.p)));
        }
        if !(self.modulus >= 1.0 && self.modulus.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "modulus must be finite and >= 1, got {}",
                self.modulus
            )));
        }
        if self.truncation < 2 || self.truncation > 100_000 {
            return Err(Error::InvalidParameter(format!(
                "truncation must lie in 2..=100000, got {}",
                self.truncation
            )));
        }
        for (e, name) in [(self.exponent_quadratic, "quadratic"), (self.exponent_quartic, "quartic")] {
            if e == 0 || e > 64 {
                return Err(Error::InvalidParameter(format!(
                    "{name} modulus exponent must lie in 1..=64, got {e}"
                )));
            }
        }
        Ok(())
    }

    pub fn eq_params(&self) -> EquationParams {
        EquationParams { n: self.n }
    }

    pub fn with_exponents(&self, e_q: u32, e_t: u32) -> Self {
        let mut b = *self;
        b.exponent_quadratic = e_q;
        b.exponent_quartic = e_t;
        b
    }
}

/// One summand of the doubling-step budget: `coeff * phi(a x, b x)`. The
/// global 1/(n^2 (n^2-1)) prefactor is kept outside; the zero-argument block
/// carries its extra 1/(n^2-1) inside `coeff`.
#[derive(Debug, Clone, Copy)]
struct BudgetTerm {
    coeff: f64,
    a: f64,
    b: f64,
}

fn budget_terms(n: f64) -> [BudgetTerm; 17] {
    let n2 = n * n;
    let n4 = n2 * n2;
    let d = n2 - 1.0;
    let t = |coeff: f64, a: f64, b: f64| BudgetTerm { coeff, a, b };
    [
        t(1.0, 1.0, n + 2.0),
        t(1.0, 1.0, n - 2.0),
        t(4.0, 1.0, n + 1.0),
        t(4.0, 1.0, n - 1.0),
        t(10.0, 1.0, n),
        t(1.0, 2.0, 2.0),
        t(4.0, 2.0, 1.0),
        t(n2, 1.0, 3.0),
        t(2.0 * (3.0 * n2 - 1.0), 1.0, 2.0),
        t(17.0 * n2 - 8.0, 1.0, 1.0),
        t(n2 / d, 0.0, n + 1.0),
        t(n2 / d, 0.0, n - 3.0),
        t(10.0 * n2 / d, 0.0, n - 1.0),
        t(4.0 * n2 / d, 0.0, n),
        t(4.0 * n2 / d, 0.0, n - 2.0),
        t((n4 + 1.0) / d, 0.0, 2.0),
        t(2.0 * (3.0 * n4 - n2 + 2.0) / d, 0.0, 1.0),
    ]
}

fn prefactor(n: f64) -> f64 {
    let n2 = n * n;
    1.0 / (n2 * (n2 - 1.0))
}

/// Budget for one doubling step: the 17-term combination of control values
/// along the ray of x. The same combination serves the quadratic and the
/// quartic chain.
pub fn step_budget(phi: &Perturbation, eq: &EquationParams, x: &[f64]) -> Result<f64> {
    phi.validate()?;
    let n = eq.n_f();
    let nx = domain_norm(x);
    let sum: f64 = budget_terms(n)
        .iter()
        .map(|t| t.coeff * phi.eval_norms(t.a * nx, t.b.abs() * nx))
        .sum();
    Ok(prefactor(n) * sum)
}

/// p-power upper bound on `step_budget^p`, obtained by distributing the
/// p-th power over the sum (each coefficient raised to p individually).
/// Lemma direction: `step_budget^p <= step_budget_power`.
pub fn step_budget_power(phi: &Perturbation, eq: &EquationParams, p: f64, x: &[f64]) -> Result<f64> {
    phi.validate()?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
    }
    let n = eq.n_f();
    let nx = domain_norm(x);
    let sum: f64 = budget_terms(n)
        .iter()
        .map(|t| t.coeff.powf(p) * phi.eval_norms(t.a * nx, t.b.abs() * nx).powf(p))
        .sum();
    Ok(prefactor(n).powf(p) * sum)
}

fn threshold(component: Component) -> f64 {
    match component {
        Component::Quadratic => 2.0,
        Component::Quartic => 4.0,
    }
}

fn regime_error(component: Component, direction: Direction, degree: f64) -> Error {
    let crit = threshold(component);
    if degree == crit {
        Error::Regime(format!(
            "{} series: effective control exponent {degree} sits at the critical value {crit}; \
             no scaling direction converges there",
            component.name()
        ))
    } else {
        let (dir, need, other) = match direction {
            Direction::Shrink => ("shrink", "above", "grow"),
            Direction::Grow => ("grow", "below", "shrink"),
        };
        Error::Regime(format!(
            "{} {dir}-direction series diverges: effective control exponent {degree} must be \
             {need} {crit}; the {other} direction converges for this control",
            component.name()
        ))
    }
}

/// Direction in which the dyadic series for this component converges, given
/// the control. Errors at a critical exponent. For the sum kind both
/// exponents must fall on the same side of the threshold.
pub fn admissible_direction(component: Component, phi: &Perturbation) -> Result<Direction> {
    phi.validate()?;
    let crit = threshold(component);
    let degrees: Vec<f64> = phi.monomials().iter().map(|(rx, ry)| rx + ry).collect();
    if let Some(&d) = degrees.iter().find(|&&d| d == crit) {
        return Err(regime_error(component, Direction::Grow, d));
    }
    let all_below = degrees.iter().all(|&d| d < crit);
    let all_above = degrees.iter().all(|&d| d > crit);
    if all_below {
        Ok(Direction::Grow)
    } else if all_above {
        Ok(Direction::Shrink)
    } else {
        Err(Error::Regime(format!(
            "{} series: control exponents straddle the critical value {crit} \
             (degrees {degrees:?}); no single scaling direction converges",
            component.name()
        )))
    }
}

/// Geometric factor of the dyadic series for a ray degree `lambda`:
/// shrink sums `(w^p 2^{-lambda p})^i` over i >= 1, grow sums
/// `(2^{lambda p} w^{-p})^i` over i >= 0.
fn geometric_factor(
    component: Component,
    direction: Direction,
    lambda: f64,
    p: f64,
) -> Result<f64> {
    let log_w = match component {
        Component::Quadratic => 2.0,
        Component::Quartic => 4.0,
    };
    match direction {
        Direction::Shrink => {
            if lambda <= log_w {
                return Err(regime_error(component, direction, lambda));
            }
            let q = ((log_w - lambda) * p).exp2();
            Ok(q / (1.0 - q))
        }
        Direction::Grow => {
            if lambda >= log_w {
                return Err(regime_error(component, direction, lambda));
            }
            let q = ((lambda - log_w) * p).exp2();
            Ok(1.0 / (1.0 - q))
        }
    }
}

/// Closed-form dyadic series of step budgets. For controls homogeneous along
/// rays each of the 17 terms contributes one geometric series; the sum kind
/// with r != s is split into its monomials first (p-power split, an upper
/// bound that is exact at p = 1).
pub fn series_budget(
    component: Component,
    direction: Direction,
    phi: &Perturbation,
    bp: &BoundParams,
    x: &[f64],
) -> Result<f64> {
    phi.validate()?;
    bp.validate()?;
    if phi.theta == 0.0 {
        return Ok(0.0);
    }
    let eq = bp.eq_params();
    if let Some(lambda) = phi.ray_degree() {
        let g = geometric_factor(component, direction, lambda, bp.p)?;
        let base = step_budget_power(phi, &eq, bp.p, x)?;
        Ok(base * g)
    } else {
        let mut total = 0.0;
        for (rx, ry) in phi.monomials() {
            let piece = Perturbation {
                kind: PerturbationKind::PowerProduct,
                theta: phi.theta,
                r: rx,
                s: ry,
            };
            // Monomials with a zero exponent degenerate to the pure kinds.
            let piece = match (rx > 0.0, ry > 0.0) {
                (true, true) => piece,
                (true, false) => Perturbation::power_x(phi.theta, rx),
                (false, true) => Perturbation::power_y(phi.theta, ry),
                (false, false) => Perturbation::constant(phi.theta),
            };
            total += series_budget(component, direction, &piece, bp, x)?;
        }
        Ok(total)
    }
}

/// Truncated dyadic series of exact step-budget powers. Accepts the
/// truncation when the last term is below 1e-9 of the partial sum and the
/// terms are shrinking; otherwise reports the regime violation.
pub fn series_budget_truncated(
    component: Component,
    direction: Direction,
    phi: &Perturbation,
    bp: &BoundParams,
    x: &[f64],
) -> Result<f64> {
    phi.validate()?;
    bp.validate()?;
    if phi.theta == 0.0 {
        return Ok(0.0);
    }
    let eq = bp.eq_params();
    let log_w = match component {
        Component::Quadratic => 2.0,
        Component::Quartic => 4.0,
    };
    let mut partial = 0.0;
    let mut last = f64::NAN;
    let mut prev = f64::NAN;
    for k in 0..bp.truncation {
        // exp2-based weights keep deep truncations finite.
        let (weight, scale) = match direction {
            Direction::Shrink => {
                let i = (k + 1) as f64;
                ((log_w * i * bp.p).exp2(), (-i).exp2())
            }
            Direction::Grow => {
                let i = k as f64;
                ((-log_w * i * bp.p).exp2(), i.exp2())
            }
        };
        let arg: Vec<f64> = x.iter().map(|c| c * scale).collect();
        let term = weight * step_budget_power(phi, &eq, bp.p, &arg)?;
        partial += term;
        prev = last;
        last = term;
    }
    if partial == 0.0 {
        // Control vanishes along this ray (x = 0 with a power kind).
        return Ok(0.0);
    }
    let tail_frac = last / partial;
    let shrinking = prev.is_nan() || last < prev;
    if tail_frac >= 1e-9 || !shrinking {
        return Err(Error::Regime(format!(
            "{} {}-direction series did not settle within {} terms: last-term fraction {:.3e}, \
             terms {}; the control exponent regime does not match this direction",
            component.name(),
            match direction {
                Direction::Shrink => "shrink",
                Direction::Grow => "grow",
            },
            bp.truncation,
            tail_frac,
            if shrinking { "shrinking" } else { "not shrinking" },
        )));
    }
    Ok(partial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFlavor {
    Quadratic,
    Quartic,
    Mixed,
}

impl BoundFlavor {
    pub fn name(&self) -> &'static str {
        match self {
            BoundFlavor::Quadratic => "quadratic",
            BoundFlavor::Quartic => "quartic",
            BoundFlavor::Mixed => "mixed",
        }
    }
}

fn series_for(
    component: Component,
    direction: Direction,
    phi: &Perturbation,
    bp: &BoundParams,
    x: &[f64],
    truncated: bool,
) -> Result<f64> {
    if truncated {
        series_budget_truncated(component, direction, phi, bp, x)
    } else {
        series_budget(component, direction, phi, bp, x)
    }
}

fn component_bound(
    component: Component,
    direction: Direction,
    phi: &Perturbation,
    bp: &BoundParams,
    x: &[f64],
    truncated: bool,
) -> Result<f64> {
    let (divisor, exponent) = match component {
        Component::Quadratic => (4.0, bp.exponent_quadratic),
        Component::Quartic => (16.0, bp.exponent_quartic),
    };
    let series = series_for(component, direction, phi, bp, x, truncated)?;
    Ok(bp.modulus.powi(exponent as i32) / divisor * series.powf(1.0 / bp.p))
}

/// Certified distance bound. The single-component flavors use the given
/// direction; the mixed flavor resolves each component's direction from the
/// control regime, since the two parts may need opposite scalings.
pub fn theorem_bound(
    flavor: BoundFlavor,
    direction: Direction,
    phi: &Perturbation,
    bp: &BoundParams,
    x: &[f64],
) -> Result<f64> {
    theorem_bound_impl(flavor, direction, phi, bp, x, false)
}

/// Same bound with the series evaluated by truncated summation instead of
/// the geometric closed form.
pub fn theorem_bound_truncated(
    flavor: BoundFlavor,
    direction: Direction,
    phi: &Perturbation,
    bp: &BoundParams,
    x: &[f64],
) -> Result<f64> {
    theorem_bound_impl(flavor, direction, phi, bp, x, true)
}

fn theorem_bound_impl(
    flavor: BoundFlavor,
    direction: Direction,
    phi: &Perturbation,
    bp: &BoundParams,
    x: &[f64],
    truncated: bool,
) -> Result<f64> {
    phi.validate()?;
    bp.validate()?;
    match flavor {
        BoundFlavor::Quadratic => component_bound(Component::Quadratic, direction, phi, bp, x, truncated),
        BoundFlavor::Quartic => component_bound(Component::Quartic, direction, phi, bp, x, truncated),
        BoundFlavor::Mixed => {
            if phi.theta == 0.0 {
                return Ok(0.0);
            }
            let dir_q = admissible_direction(Component::Quadratic, phi)?;
            let dir_t = admissible_direction(Component::Quartic, phi)?;
            let sq = series_for(Component::Quadratic, dir_q, phi, bp, x, truncated)?;
            let st = series_for(Component::Quartic, dir_t, phi, bp, x, truncated)?;
            let m = bp.modulus.powi(bp.exponent_quadratic as i32 + 1);
            Ok(m / 192.0 * (4.0 * sq.powf(1.0 / bp.p) + st.powf(1.0 / bp.p)))
        }
    }
}

/// The printed closed-form constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormKind {
    QuadConstant,
    QuadPowerX,
    QuadPowerY,
    QuadProduct,
    QuartConstant,
    QuartPowerX,
    QuartPowerY,
    QuartProduct,
    MixedSum,
    MixedProduct,
}

impl ClosedFormKind {
    pub const ALL: [ClosedFormKind; 10] = [
        ClosedFormKind::QuadConstant,
        ClosedFormKind::QuadPowerX,
        ClosedFormKind::QuadPowerY,
        ClosedFormKind::QuadProduct,
        ClosedFormKind::QuartConstant,
        ClosedFormKind::QuartPowerX,
        ClosedFormKind::QuartPowerY,
        ClosedFormKind::QuartProduct,
        ClosedFormKind::MixedSum,
        ClosedFormKind::MixedProduct,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClosedFormKind::QuadConstant => "quad_constant",
            ClosedFormKind::QuadPowerX => "quad_power_x",
            ClosedFormKind::QuadPowerY => "quad_power_y",
            ClosedFormKind::QuadProduct => "quad_product",
            ClosedFormKind::QuartConstant => "quart_constant",
            ClosedFormKind::QuartPowerX => "quart_power_x",
            ClosedFormKind::QuartPowerY => "quart_power_y",
            ClosedFormKind::QuartProduct => "quart_product",
            ClosedFormKind::MixedSum => "mixed_sum",
            ClosedFormKind::MixedProduct => "mixed_product",
        }
    }
}

fn pow_or_one(base: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        base.powf(e)
    }
}

/// Bracket-over-denominator piece of a closed-form constant for one monomial
/// (x-exponent, y-exponent), including the ||x||^lambda factor. Multiplying
/// by M^e theta / (n^2 (n^2-1)) gives the certified bound for that monomial.
fn closed_piece(
    component: Component,
    bp: &BoundParams,
    rx: f64,
    ry: f64,
    x: &[f64],
) -> Result<f64> {
    let lambda = rx + ry;
    let crit = threshold(component);
    if lambda == crit {
        return Err(regime_error(component, Direction::Grow, lambda));
    }
    let p = bp.p;
    let n = bp.eq_params().n_f();
    let w = component.weight();
    let bracket: f64 = budget_terms(n)
        .iter()
        .map(|t| {
            t.coeff.powf(p) * pow_or_one(t.a.abs(), rx * p) * pow_or_one(t.b.abs(), ry * p)
        })
        .sum();
    let denom = (w.powf(p) - (lambda * p).exp2()).abs();
    Ok((bracket / denom).powf(1.0 / p) * pow_or_one(domain_norm(x), lambda))
}

fn full_prefactor(bp: &BoundParams, exponent: u32, theta: f64) -> f64 {
    let n2 = (bp.n * bp.n) as f64;
    bp.modulus.powi(exponent as i32) * theta / (n2 * (n2 - 1.0))
}

fn require_kind(which: ClosedFormKind, phi: &Perturbation, wanted: &[PerturbationKind]) -> Result<()> {
    if wanted.contains(&phi.kind) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "closed form {} applies to control kinds {:?}, got {:?}",
            which.name(),
            wanted,
            phi.kind
        )))
    }
}

/// Single-flavor combination piece for the mixed closed forms: the case
/// split of the flat-rate corollaries, without the prefactor.
fn flavor_combo(component: Component, phi: &Perturbation, bp: &BoundParams, x: &[f64]) -> Result<f64> {
    match phi.kind {
        PerturbationKind::Constant => closed_piece(component, bp, 0.0, 0.0, x),
        PerturbationKind::PowerX => closed_piece(component, bp, phi.r, 0.0, x),
        PerturbationKind::PowerY => closed_piece(component, bp, 0.0, phi.s, x),
        PerturbationKind::PowerSum => {
            let crit = threshold(component);
            let same_side =
                (phi.r < crit && phi.s < crit) || (phi.r > crit && phi.s > crit);
            if !(same_side && phi.r != crit && phi.s != crit) {
                return Err(Error::Regime(format!(
                    "{} closed form for the sum control needs r and s on the same side of {crit}, \
                     got r = {}, s = {}",
                    component.name(),
                    phi.r,
                    phi.s
                )));
            }
            let a = closed_piece(component, bp, phi.r, 0.0, x)?;
            let b = closed_piece(component, bp, 0.0, phi.s, x)?;
            Ok((a.powf(bp.p) + b.powf(bp.p)).powf(1.0 / bp.p))
        }
        PerturbationKind::PowerProduct => closed_piece(component, bp, phi.r, phi.s, x),
    }
}

/// Evaluates one printed closed-form constant as a full bound (prefactor
/// included), so it is directly comparable to `theorem_bound`.
pub fn corollary_constant(
    which: ClosedFormKind,
    phi: &Perturbation,
    bp: &BoundParams,
    x: &[f64],
) -> Result<f64> {
    phi.validate()?;
    bp.validate()?;
    if phi.theta == 0.0 {
        return Ok(0.0);
    }
    use ClosedFormKind::*;
    use PerturbationKind::*;
    let quad = |rx: f64, ry: f64| -> Result<f64> {
        Ok(full_prefactor(bp, bp.exponent_quadratic, phi.theta)
            * closed_piece(Component::Quadratic, bp, rx, ry, x)?)
    };
    let quart = |rx: f64, ry: f64| -> Result<f64> {
        Ok(full_prefactor(bp, bp.exponent_quartic, phi.theta)
            * closed_piece(Component::Quartic, bp, rx, ry, x)?)
    };
    match which {
        QuadConstant => {
            require_kind(which, phi, &[Constant])?;
            quad(0.0, 0.0)
        }
        QuadPowerX => {
            require_kind(which, phi, &[PowerX])?;
            quad(phi.r, 0.0)
        }
        QuadPowerY => {
            require_kind(which, phi, &[PowerY])?;
            quad(0.0, phi.s)
        }
        QuadProduct => {
            require_kind(which, phi, &[PowerProduct])?;
            quad(phi.r, phi.s)
        }
        QuartConstant => {
            require_kind(which, phi, &[Constant])?;
            quart(0.0, 0.0)
        }
        QuartPowerX => {
            require_kind(which, phi, &[PowerX])?;
            quart(phi.r, 0.0)
        }
        QuartPowerY => {
            require_kind(which, phi, &[PowerY])?;
            quart(0.0, phi.s)
        }
        QuartProduct => {
            require_kind(which, phi, &[PowerProduct])?;
            quart(phi.r, phi.s)
        }
        MixedSum => {
            require_kind(which, phi, &[Constant, PowerX, PowerY, PowerSum])?;
            let cq = flavor_combo(Component::Quadratic, phi, bp, x)?;
            let ct = flavor_combo(Component::Quartic, phi, bp, x)?;
            Ok(mixed_prefactor(bp, phi.theta) * (cq + ct))
        }
        MixedProduct => {
            require_kind(which, phi, &[PowerProduct])?;
            let cq = closed_piece(Component::Quadratic, bp, phi.r, phi.s, x)?;
            let ct = closed_piece(Component::Quartic, bp, phi.r, phi.s, x)?;
            Ok(mixed_prefactor(bp, phi.theta) * (cq + ct))
        }
    }
}

fn mixed_prefactor(bp: &BoundParams, theta: f64) -> f64 {
    let n2 = (bp.n * bp.n) as f64;
    bp.modulus.powi(bp.exponent_quadratic as i32 + 1) * theta / (12.0 * n2 * (n2 - 1.0))
}

/// Closed-form bound for any control kind, dispatching to the matching
/// corollary constant (the sum kind combines its two monomial pieces).
pub fn corollary_bound(
    flavor: BoundFlavor,
    phi: &Perturbation,
    bp: &BoundParams,
    x: &[f64],
) -> Result<f64> {
    phi.validate()?;
    bp.validate()?;
    if phi.theta == 0.0 {
        return Ok(0.0);
    }
    match flavor {
        BoundFlavor::Quadratic => Ok(full_prefactor(bp, bp.exponent_quadratic, phi.theta)
            * flavor_combo(Component::Quadratic, phi, bp, x)?),
        BoundFlavor::Quartic => Ok(full_prefactor(bp, bp.exponent_quartic, phi.theta)
            * flavor_combo(Component::Quartic, phi, bp, x)?),
        BoundFlavor::Mixed => match phi.kind {
            PerturbationKind::PowerProduct => corollary_constant(ClosedFormKind::MixedProduct, phi, bp, x),
            _ => corollary_constant(ClosedFormKind::MixedSum, phi, bp, x),
        },
    }
}

/// The quartic power-y constant exactly as printed, for side-by-side
/// reporting: its source text detaches two terms from the n^{2p} group and
/// weights the last (n^2-1)^p term with 4^p where the quadratic counterpart
/// has 10^p. The pattern-consistent value is `corollary_constant` with
/// `QuartPowerY`.
pub fn corollary_quart_power_y_as_printed(
    phi: &Perturbation,
    bp: &BoundParams,
    x: &[f64],
) -> Result<f64> {
    require_kind(ClosedFormKind::QuartPowerY, phi, &[PerturbationKind::PowerY])?;
    phi.validate()?;
    bp.validate()?;
    if phi.theta == 0.0 {
        return Ok(0.0);
    }
    let s = phi.s;
    if s == 4.0 {
        return Err(regime_error(Component::Quartic, Direction::Grow, s));
    }
    let p = bp.p;
    let n = bp.eq_params().n_f();
    let n2 = n * n;
    let n4 = n2 * n2;
    let dp = (n2 - 1.0).powf(p);
    let sp = |base: f64| pow_or_one(base.abs(), s * p);
    let cp = |base: f64| base.powf(p);
    let bracket = sp(2.0) * cp(6.0 * n2 - 2.0) * dp
        + cp(17.0 * n2 - 8.0) * dp
        + cp(6.0 * n4 - 2.0 * n2 + 4.0)
        + n2.powf(p) * (sp(n + 1.0) + sp(n - 3.0) + cp(10.0) * sp(n - 1.0))
        + cp(10.0) * sp(n)
        + cp(4.0) * sp(n - 2.0)
        + sp(2.0) * cp(n4 + 1.0)
        + sp(3.0) * n2.powf(p) * dp
        + cp(4.0) * dp
        + sp(n + 2.0) * dp
        + sp(n - 2.0) * dp
        + cp(4.0) * sp(n + 1.0) * dp
        + cp(4.0) * sp(n - 1.0) * dp
        + cp(4.0) * sp(n) * dp;
    let denom = dp * (16.0f64.powf(p) - (s * p).exp2()).abs();
    Ok(full_prefactor(bp, bp.exponent_quartic, phi.theta)
        * (bracket / denom).powf(1.0 / p)
        * pow_or_one(domain_norm(x), s))
}

/// Iteration budget for certification runs; directions and targets are
/// chosen by the certifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterBudget {
    pub m_max: usize,
    pub tol: f64,
}

impl Default for IterBudget {
    fn default() -> Self {
        Self { m_max: 24, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PremisePair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub residual_norm: f64,
    pub control: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyPoint {
    pub x: Vec<f64>,
    pub lhs: f64,
    pub bound: f64,
    pub bound_alt: f64,
    /// lhs / bound; f64::MAX marks a zero bound with a nonzero lhs.
    pub ratio: f64,
    pub ok: bool,
    pub m_used_quadratic: Option<usize>,
    pub m_used_quartic: Option<usize>,
}

/// Outcome of a certification run. Field order is the serialization order.
#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub flavor: BoundFlavor,
    pub n: i64,
    pub p: f64,
    pub modulus: f64,
    pub exponent_quadratic: u32,
    pub exponent_quartic: u32,
    pub alt_exponent: u32,
    pub phi: Perturbation,
    pub direction_quadratic: Option<Direction>,
    pub direction_quartic: Option<Direction>,
    pub grid_points: usize,
    pub pair_count: usize,
    pub premise_ok: bool,
    pub worst_premise_ratio: f64,
    pub worst_premise_pair: Option<PremisePair>,
    /// Grid pairs where the control vanishes but the residual does not.
    pub vanishing_control_violations: usize,
    /// False when the premise failed and the bound stage was skipped.
    pub bound_evaluated: bool,
    pub bound_ok: bool,
    pub worst_bound_ratio: f64,
    /// Same check with both modulus exponents at `alt_exponent`.
    pub bound_ok_alt: bool,
    pub worst_bound_ratio_alt: f64,
    pub details: Vec<CertifyPoint>,
}

/// Full certification pipeline on a grid: residual-domination premise over
/// all grid pairs, then approximant runs and the theorem bound at every grid
/// point, at the configured modulus exponents and at the alternative
/// printed exponent. `direction` drives the single-component flavors; the
/// mixed flavor resolves each part from the control regime.
pub fn certify(
    f: &SampleFn,
    phi: &Perturbation,
    bp: &BoundParams,
    iter: &IterBudget,
    grid: &[Vec<f64>],
    flavor: BoundFlavor,
    direction: Option<Direction>,
) -> Result<CertificationReport> {
    phi.validate()?;
    bp.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidParameter("certification grid is empty".into()));
    }
    for pt in grid {
        if pt.len() != f.domain_dim() {
            return Err(Error::DimensionMismatch {
                expected: f.domain_dim(),
                got: pt.len(),
                context: "certification grid point",
            });
        }
    }
    let space = f.target();
    if (space.p - bp.p).abs() > 1e-15 {
        return Err(Error::InvalidParameter(format!(
            "bound params carry p = {} but the sample function's target space has p = {}",
            bp.p, space.p
        )));
    }
    let eq = bp.eq_params();

    // Premise: the control must dominate the residual on every grid pair.
    struct PairOutcome {
        ratio: f64,
        pair: PremisePair,
        vanishing_violation: bool,
    }
    let pair_indices: Vec<(usize, usize)> =
        (0..grid.len()).flat_map(|i| (0..grid.len()).map(move |j| (i, j))).collect();
    let outcomes: Vec<PairOutcome> = pair_indices
        .par_iter()
        .map(|&(i, j)| {
            let (x, y) = (&grid[i], &grid[j]);
            let probe = residual_probe(f, &eq, x, y)?;
            let rnorm = probe.residual_norm(&space);
            let control = phi.eval(x, y);
            let (ratio, vanishing_violation) = if control > 0.0 {
                (rnorm / control, false)
            } else {
                (0.0, !probe.within(&space, 1e-9))
            };
            Ok(PairOutcome {
                ratio,
                pair: PremisePair {
                    x: x.clone(),
                    y: y.clone(),
                    residual_norm: rnorm,
                    control,
                },
                vanishing_violation,
            })
        })
        .collect::<Result<_>>()?;

    let vanishing_control_violations = outcomes.iter().filter(|o| o.vanishing_violation).count();
    let worst = outcomes.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio));
    let worst_premise_ratio = worst.map(|o| o.ratio).unwrap_or(0.0);
    let worst_premise_pair = worst.map(|o| o.pair.clone());
    let premise_ok =
        vanishing_control_violations == 0 && ineq_holds(worst_premise_ratio, 1.0);

    let alt_exponent = ALT_MODULUS_EXPONENT;
    let mut report = CertificationReport {
        flavor,
        n: bp.n,
        p: bp.p,
        modulus: bp.modulus,
        exponent_quadratic: bp.exponent_quadratic,
        exponent_quartic: bp.exponent_quartic,
        alt_exponent,
        phi: *phi,
        direction_quadratic: None,
        direction_quartic: None,
        grid_points: grid.len(),
        pair_count: pair_indices.len(),
        premise_ok,
        worst_premise_ratio,
        worst_premise_pair,
        vanishing_control_violations,
        bound_evaluated: false,
        bound_ok: false,
        worst_bound_ratio: 0.0,
        bound_ok_alt: false,
        worst_bound_ratio_alt: 0.0,
        details: Vec::new(),
    };
    if !premise_ok {
        return Ok(report);
    }

    // Directions: explicit for single components, regime-dispatched
    // otherwise. theta = 0 has no series to steer, any direction works.
    let trivial = phi.theta == 0.0;
    let dispatch = |c: Component| -> Result<Direction> {
        if trivial {
            Ok(Direction::Grow)
        } else {
            admissible_direction(c, phi)
        }
    };
    let (dir_q, dir_t) = match flavor {
        BoundFlavor::Quadratic => {
            let d = match direction {
                Some(d) => d,
                None => dispatch(Component::Quadratic)?,
            };
            (Some(d), None)
        }
        BoundFlavor::Quartic => {
            let d = match direction {
                Some(d) => d,
                None => dispatch(Component::Quartic)?,
            };
            (None, Some(d))
        }
        BoundFlavor::Mixed => (Some(dispatch(Component::Quadratic)?), Some(dispatch(Component::Quartic)?)),
    };
    report.direction_quadratic = dir_q;
    report.direction_quartic = dir_t;

    let bp_alt = bp.with_exponents(alt_exponent, alt_exponent);
    let run = |cfg: IterationConfig, x: &[f64]| -> Result<crate::hyers::ApproximantResult> {
        let r = approximant(f, &cfg, x)?;
        if !r.converged {
            return Err(Error::Unconverged {
                target: cfg.target.name(),
                tail: r.tail,
                tol: cfg.tol,
                m_max: cfg.m_max,
            });
        }
        Ok(r)
    };

    let details: Vec<CertifyPoint> = grid
        .par_iter()
        .map(|x| -> Result<CertifyPoint> {
            let (lhs, bound, bound_alt, m_q, m_t) = match flavor {
                BoundFlavor::Quadratic | BoundFlavor::Quartic => {
                    let (component, dir) = match flavor {
                        BoundFlavor::Quadratic => (Component::Quadratic, dir_q.unwrap()),
                        _ => (Component::Quartic, dir_t.unwrap()),
                    };
                    let cfg = IterationConfig {
                        m_max: iter.m_max,
                        tol: iter.tol,
                        direction: dir,
                        target: component,
                    };
                    let r = run(cfg, x)?;
                    let part = component.transform(f);
                    let lhs = space.norm(&part.value(x).sub(&r.value));
                    let bound = if trivial {
                        0.0
                    } else {
                        theorem_bound(flavor, dir, phi, bp, x)?
                    };
                    let bound_alt = if trivial {
                        0.0
                    } else {
                        theorem_bound(flavor, dir, phi, &bp_alt, x)?
                    };
                    let (m_q, m_t) = match component {
                        Component::Quadratic => (Some(r.m_used), None),
                        Component::Quartic => (None, Some(r.m_used)),
                    };
                    (lhs, bound, bound_alt, m_q, m_t)
                }
                BoundFlavor::Mixed => {
                    let cfg_q = IterationConfig {
                        m_max: iter.m_max,
                        tol: iter.tol,
                        direction: dir_q.unwrap(),
                        target: Component::Quadratic,
                    };
                    let cfg_t = IterationConfig {
                        m_max: iter.m_max,
                        tol: iter.tol,
                        direction: dir_t.unwrap(),
                        target: Component::Quartic,
                    };
                    let rq = run(cfg_q, x)?;
                    let rt = run(cfg_t, x)?;
                    let q = rq.value.scale(-1.0 / 12.0);
                    let t = rt.value.scale(1.0 / 12.0);
                    let fx = f.value(x);
                    let lhs = space.norm(&fx.sub(&q).sub(&t));
                    let bound = if trivial {
                        0.0
                    } else {
                        theorem_bound(flavor, dir_q.unwrap(), phi, bp, x)?
                    };
                    let bound_alt = if trivial {
                        0.0
                    } else {
                        theorem_bound(flavor, dir_q.unwrap(), phi, &bp_alt, x)?
                    };
                    (lhs, bound, bound_alt, Some(rq.m_used), Some(rt.m_used))
                }
            };
            let tol_zero = 1e-9 * (1.0 + space.norm(&f.value(x)));
            let (ratio, ok) = if bound > 0.0 {
                (lhs / bound, ineq_holds(lhs, bound))
            } else if lhs <= tol_zero {
                (0.0, true)
            } else {
                (f64::MAX, false)
            };
            Ok(CertifyPoint {
                x: x.clone(),
                lhs,
                bound,
                bound_alt,
                ratio,
                ok,
                m_used_quadratic: m_q,
                m_used_quartic: m_t,
            })
        })
        .collect::<Result<_>>()?;

    report.bound_evaluated = true;
    report.bound_ok = details.iter().all(|d| d.ok);
    report.worst_bound_ratio =
        details.iter().map(|d| d.ratio).fold(0.0, f64::max);
    let alt_ok_ratio = |d: &CertifyPoint| -> (bool, f64) {
        if d.bound_alt > 0.0 {
            (ineq_holds(d.lhs, d.bound_alt), d.lhs / d.bound_alt)
        } else if d.ratio == 0.0 {
            (true, 0.0)
        } else {
            (false, f64::MAX)
        }
    };
    report.bound_ok_alt = details.iter().all(|d| alt_ok_ratio(d).0);
    report.worst_bound_ratio_alt =
        details.iter().map(|d| alt_ok_ratio(d).1).fold(0.0, f64::max);
    report.details = details;
    Ok(report)
}
