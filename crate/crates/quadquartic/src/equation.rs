//! The mixed quadratic-quartic functional equation and its exact solutions.
//!
//! For an integer scale n with |n| >= 2, a function f between real coordinate
//! spaces satisfies the equation when the residual
//!
//! ```text
//! R(x, y) = f(nx+y) + f(nx-y) - n^2 f(x+y) - n^2 f(x-y)
//!           - 2 f(nx) + 2 n^2 f(x) + 2 (n^2 - 1) f(y)
//! ```
//!
//! vanishes for all x, y. On one-dimensional domains the solutions are exactly
//! `a x^4 + b x^2`; in general they are diagonals of a symmetric bi-additive
//! form plus a symmetric 4-additive form. The doubling transforms
//! `f(2x) - 16 f(x)` and `f(2x) - 4 f(x)` isolate the quadratic and the
//! quartic component (scaled by -12 and 12), and `f = (h - g) / 12` puts the
//! pieces back together.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pnorm::{QuasiNormSpec, YVector};

/// Integer scale parameter of the equation. 0 and +-1 collapse the equation
/// to a triviality, so they are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationParams {
    pub n: i64,
}

impl EquationParams {
    pub fn new(n: i64) -> Result<Self> {
        if n == 0 || n == 1 || n == -1 {
            return Err(Error::InvalidParameter(format!(
                "equation scale n must satisfy |n| >= 2, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn n_f(&self) -> f64 {
        self.n as f64
    }

    pub fn n_sq(&self) -> f64 {
        (self.n * self.n) as f64
    }
}

/// a.x + b.y on domain points.
pub(crate) fn xcomb(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect()
}

pub(crate) fn xscale(a: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|xi| a * xi).collect()
}

type EvalFn = Arc<dyn Fn(&[f64]) -> YVector + Send + Sync>;

/// A sampled function from R^domain_dim into a p-normed target space.
///
/// Wraps an arbitrary evaluation closure; the constructor checks that the
/// closure is zero at the origin, which every identity in this module
/// assumes. Cloning is cheap (the closure is shared).
#[derive(Clone)]
pub struct SampleFn {
    domain_dim: usize,
    target: QuasiNormSpec,
    label: String,
    eval: EvalFn,
}

impl fmt::Debug for SampleFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampleFn")
            .field("domain_dim", &self.domain_dim)
            .field("target", &self.target)
            .field("label", &self.label)
            .finish()
    }
}

impl SampleFn {
    pub fn new(
        domain_dim: usize,
        target: QuasiNormSpec,
        label: impl Into<String>,
        eval: impl Fn(&[f64]) -> YVector + Send + Sync + 'static,
    ) -> Result<Self> {
        if domain_dim == 0 {
            return Err(Error::InvalidParameter("domain dimension must be >= 1".into()));
        }
        target.validate()?;
        let f = Self { domain_dim, target, label: label.into(), eval: Arc::new(eval) };
        let at_zero = f.value(&vec![0.0; domain_dim]);
        if at_zero.dim() != target.dim {
            return Err(Error::DimensionMismatch {
                expected: target.dim,
                got: at_zero.dim(),
                context: "sample function output",
            });
        }
        if target.norm(&at_zero) > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "sample function '{}' must vanish at the origin, got |f(0)| = {:e}",
                f.label,
                target.norm(&at_zero)
            )));
        }
        Ok(f)
    }

    /// Scalar-to-scalar helper: domain and target are one-dimensional, the
    /// target carrying the given p.
    pub fn scalar(
        p: f64,
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let target = QuasiNormSpec::new(1, p)?;
        Self::new(1, target, label, move |x| YVector::scalar(f(x[0])))
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn target(&self) -> QuasiNormSpec {
        self.target
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Evaluate with input validation.
    pub fn eval(&self, x: &[f64]) -> Result<YVector> {
        if x.len() != self.domain_dim {
            return Err(Error::DimensionMismatch {
                expected: self.domain_dim,
                got: x.len(),
                context: "sample function input",
            });
        }
        Ok((self.eval)(x))
    }

    /// Evaluate without validation; for internal hot paths where the caller
    /// constructed the point at the right dimension.
    pub(crate) fn value(&self, x: &[f64]) -> YVector {
        (self.eval)(x)
    }
}

/// Residual evaluation together with the magnitude of the terms that entered
/// it, for magnitude-relative tolerance checks.
#[derive(Debug, Clone)]
pub struct Probe {
    pub residual: YVector,
    /// Largest target norm among the function values combined into the
    /// residual. A residual is "numerically zero" when its norm is below
    /// `tol * (1 + magnitude)`.
    pub magnitude: f64,
}

impl Probe {
    pub fn residual_norm(&self, space: &QuasiNormSpec) -> f64 {
        space.norm(&self.residual)
    }

    pub fn within(&self, space: &QuasiNormSpec, tol: f64) -> bool {
        self.residual_norm(space) <= tol * (1.0 + self.magnitude)
    }
}

fn combine(space: &QuasiNormSpec, terms: &[(f64, YVector)]) -> Probe {
    let mut acc = space.zero();
    let mut magnitude = 0.0_f64;
    for (c, v) in terms {
        magnitude = magnitude.max(space.norm(v));
        acc = acc.add(&v.scale(*c));
    }
    Probe { residual: acc, magnitude }
}

/// Equation residual and the magnitude scale of its terms.
pub fn residual_probe(f: &SampleFn, params: &EquationParams, x: &[f64], y: &[f64]) -> Result<Probe> {
    if x.len() != f.domain_dim || y.len() != f.domain_dim {
        return Err(Error::DimensionMismatch {
            expected: f.domain_dim,
            got: if x.len() != f.domain_dim { x.len() } else { y.len() },
            context: "residual input point",
        });
    }
    let n = params.n_f();
    let n2 = params.n_sq();
    let space = f.target;
    let terms = [
        (1.0, f.value(&xcomb(n, x, 1.0, y))),
        (1.0, f.value(&xcomb(n, x, -1.0, y))),
        (-n2, f.value(&xcomb(1.0, x, 1.0, y))),
        (-n2, f.value(&xcomb(1.0, x, -1.0, y))),
        (-2.0, f.value(&xscale(n, x))),
        (2.0 * n2, f.value(x)),
        (2.0 * (n2 - 1.0), f.value(y)),
    ];
    Ok(combine(&space, &terms))
}

/// Equation residual `R(x, y)`; zero exactly on solutions.
pub fn residual(f: &SampleFn, params: &EquationParams, x: &[f64], y: &[f64]) -> Result<YVector> {
    residual_probe(f, params, x, y).map(|p| p.residual)
}

/// `g(x) = f(2x) - 16 f(x)`. On a solution `a x^4 + b x^2` this equals
/// `-12 b x^2`: the quadratic component, scaled.
pub fn quad_transform(f: &SampleFn) -> SampleFn {
    part_transform(f, 16.0, "quad_part")
}

/// `h(x) = f(2x) - 4 f(x)`. On a solution `a x^4 + b x^2` this equals
/// `12 a x^4`: the quartic component, scaled.
pub fn quart_transform(f: &SampleFn) -> SampleFn {
    part_transform(f, 4.0, "quart_part")
}

fn part_transform(f: &SampleFn, weight: f64, tag: &str) -> SampleFn {
    let inner = f.clone();
    SampleFn {
        domain_dim: f.domain_dim,
        target: f.target,
        label: format!("{tag}({})", f.label),
        eval: Arc::new(move |x| {
            let doubled = xscale(2.0, x);
            inner.value(&doubled).sub(&inner.value(x).scale(weight))
        }),
    }
}

/// Inverse of the pair of part transforms: `f = (h - g) / 12`.
pub fn recompose(g: &SampleFn, h: &SampleFn) -> Result<SampleFn> {
    if g.domain_dim != h.domain_dim || g.target != h.target {
        return Err(Error::InvalidParameter(
            "recompose requires both parts on the same domain and target space".into(),
        ));
    }
    let (gi, hi) = (g.clone(), h.clone());
    Ok(SampleFn {
        domain_dim: g.domain_dim,
        target: g.target,
        label: format!("recompose({}, {})", g.label, h.label),
        eval: Arc::new(move |x| hi.value(x).sub(&gi.value(x)).scale(1.0 / 12.0)),
    })
}

/// Derived identities satisfied by every solution. Each names the structural
/// move that produces it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// f(x+2y) + f(x-2y) = 4f(x+y) + 4f(x-y) + 2f(2y) - 8f(y) - 6f(x)
    DoubledY,
    /// f(2x+y) + f(2x-y) = 4f(x+y) + 4f(x-y) + 2f(2x) - 8f(x) - 6f(y)
    DoubledX,
    /// f(4x) = 20 f(2x) - 64 f(x)
    DoubleStep,
    /// f((n+1)y) + f((n-1)y) = n^2 f(2y) - 2(2n^2-1) f(y) + 2 f(ny)
    AdjacentMultiples,
    /// The quartic part h satisfies
    /// h(2x+y) + h(2x-y) = 4h(x+y) + 4h(x-y) + 24h(x) - 6h(y)
    QuarticPart,
    /// The quadratic part g satisfies g(x+y) + g(x-y) = 2g(x) + 2g(y)
    QuadraticPart,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::DoubledY,
        Identity::DoubledX,
        Identity::DoubleStep,
        Identity::AdjacentMultiples,
        Identity::QuarticPart,
        Identity::QuadraticPart,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::DoubledY => "doubled_y",
            Identity::DoubledX => "doubled_x",
            Identity::DoubleStep => "double_step",
            Identity::AdjacentMultiples => "adjacent_multiples",
            Identity::QuarticPart => "quartic_part",
            Identity::QuadraticPart => "quadratic_part",
        }
    }
}

/// Identity residual with term magnitude. Identities that involve only one
/// of the two points ignore the other.
pub fn identity_probe(
    f: &SampleFn,
    id: Identity,
    params: &EquationParams,
    x: &[f64],
    y: &[f64],
) -> Result<Probe> {
    if x.len() != f.domain_dim || y.len() != f.domain_dim {
        return Err(Error::DimensionMismatch {
            expected: f.domain_dim,
            got: if x.len() != f.domain_dim { x.len() } else { y.len() },
            context: "identity input point",
        });
    }
    let space = f.target;
    let n = params.n_f();
    let n2 = params.n_sq();
    let probe = match id {
        Identity::DoubledY => combine(
            &space,
            &[
                (1.0, f.value(&xcomb(1.0, x, 2.0, y))),
                (1.0, f.value(&xcomb(1.0, x, -2.0, y))),
                (-4.0, f.value(&xcomb(1.0, x, 1.0, y))),
                (-4.0, f.value(&xcomb(1.0, x, -1.0, y))),
                (-2.0, f.value(&xscale(2.0, y))),
                (8.0, f.value(y)),
                (6.0, f.value(x)),
            ],
        ),
        Identity::DoubledX => combine(
            &space,
            &[
                (1.0, f.value(&xcomb(2.0, x, 1.0, y))),
                (1.0, f.value(&xcomb(2.0, x, -1.0, y))),
                (-4.0, f.value(&xcomb(1.0, x, 1.0, y))),
                (-4.0, f.value(&xcomb(1.0, x, -1.0, y))),
                (-2.0, f.value(&xscale(2.0, x))),
                (8.0, f.value(x)),
                (6.0, f.value(y)),
            ],
        ),
        Identity::DoubleStep => combine(
            &space,
            &[
                (1.0, f.value(&xscale(4.0, x))),
                (-20.0, f.value(&xscale(2.0, x))),
                (64.0, f.value(x)),
            ],
        ),
        Identity::AdjacentMultiples => combine(
            &space,
            &[
                (1.0, f.value(&xscale(n + 1.0, y))),
                (1.0, f.value(&xscale(n - 1.0, y))),
                (-n2, f.value(&xscale(2.0, y))),
                (2.0 * (2.0 * n2 - 1.0), f.value(y)),
                (-2.0, f.value(&xscale(n, y))),
            ],
        ),
        Identity::QuarticPart => {
            let h = quart_transform(f);
            combine(
                &space,
                &[
                    (1.0, h.value(&xcomb(2.0, x, 1.0, y))),
                    (1.0, h.value(&xcomb(2.0, x, -1.0, y))),
                    (-4.0, h.value(&xcomb(1.0, x, 1.0, y))),
                    (-4.0, h.value(&xcomb(1.0, x, -1.0, y))),
                    (-24.0, h.value(x)),
                    (6.0, h.value(y)),
                ],
            )
        }
        Identity::QuadraticPart => {
            let g = quad_transform(f);
            combine(
                &space,
                &[
                    (1.0, g.value(&xcomb(1.0, x, 1.0, y))),
                    (1.0, g.value(&xcomb(1.0, x, -1.0, y))),
                    (-2.0, g.value(x)),
                    (-2.0, g.value(y)),
                ],
            )
        }
    };
    Ok(probe)
}

pub fn identity_residual(
    f: &SampleFn,
    id: Identity,
    params: &EquationParams,
    x: &[f64],
    y: &[f64],
) -> Result<YVector> {
    identity_probe(f, id, params, x, y).map(|p| p.residual)
}

/// Recover the symmetric bi-additive form from a quadratic diagonal:
/// `B(x, y) = (q(x+y) - q(x-y)) / 4`, so `B(x, x) = q(x)`.
pub fn biadditive_form(q: &SampleFn, x: &[f64], y: &[f64]) -> Result<YVector> {
    if x.len() != q.domain_dim || y.len() != q.domain_dim {
        return Err(Error::DimensionMismatch {
            expected: q.domain_dim,
            got: if x.len() != q.domain_dim { x.len() } else { y.len() },
            context: "biadditive form input",
        });
    }
    let plus = q.value(&xcomb(1.0, x, 1.0, y));
    let minus = q.value(&xcomb(1.0, x, -1.0, y));
    Ok(plus.sub(&minus).scale(0.25))
}

/// Recover the symmetric 4-linear form from a quartic diagonal via the
/// alternating-sum polarization over all subsets of the four arguments:
/// `D(x1,..,x4) = (1/24) sum_{S} (-1)^{4-|S|} h(sum_{i in S} x_i)`,
/// so `D(x, x, x, x) = h(x)`.
pub fn polarize_quartic(h: &SampleFn, args: [&[f64]; 4]) -> Result<YVector> {
    for a in &args {
        if a.len() != h.domain_dim {
            return Err(Error::DimensionMismatch {
                expected: h.domain_dim,
                got: a.len(),
                context: "polarization input",
            });
        }
    }
    let mut acc = h.target.zero();
    for mask in 0u32..16 {
        let mut point = vec![0.0; h.domain_dim];
        for (i, a) in args.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (pc, ac) in point.iter_mut().zip(*a) {
                    *pc += ac;
                }
            }
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc.add(&h.value(&point).scale(sign));
    }
    Ok(acc.scale(1.0 / 24.0))
}

/// One-dimensional exact solution `a x^4 + b x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolySolution {
    pub a: f64,
    pub b: f64,
}

impl PolySolution {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn eval(&self, x: f64) -> f64 {
        // x2*x2 rather than powi keeps doubling relations exact in floating
        // point: scaling x by a power of two scales every intermediate by a
        // power of two, bit for bit.
        let x2 = x * x;
        self.a * (x2 * x2) + self.b * x2
    }

    pub fn sample_fn(&self, p: f64) -> Result<SampleFn> {
        let me = *self;
        SampleFn::scalar(p, format!("poly(a={}, b={})", self.a, self.b), move |x| me.eval(x))
    }
}

/// General exact solution on R^dim: per target coordinate, the diagonal of a
/// symmetric bilinear form plus the diagonal of a symmetric 4-linear form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormSolution {
    /// `bilinear[c][i][j]`, symmetrized on construction.
    pub bilinear: Vec<Vec<Vec<f64>>>,
    /// `quartic[c][i][j][k][l]`, symmetrized on construction.
    pub quartic: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
}

impl FormSolution {
    /// Builds from coefficient arrays of shape `[target_dim][d][d]` and
    /// `[target_dim][d][d][d][d]`; both are symmetrized (averaged over index
    /// permutations), which leaves the diagonal values unchanged.
    pub fn new(
        bilinear: Vec<Vec<Vec<f64>>>,
        quartic: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
    ) -> Result<Self> {
        if bilinear.is_empty() || bilinear.len() != quartic.len() {
            return Err(Error::InvalidParameter(
                "form solution needs matching nonempty coefficient arrays per target coordinate"
                    .into(),
            ));
        }
        let d = bilinear[0].len();
        if d == 0 {
            return Err(Error::InvalidParameter("form solution domain dimension must be >= 1".into()));
        }
        let shape_ok = bilinear.iter().all(|m| m.len() == d && m.iter().all(|r| r.len() == d))
            && quartic.iter().all(|t| {
                t.len() == d
                    && t.iter().all(|a| {
                        a.len() == d
                            && a.iter().all(|b| b.len() == d && b.iter().all(|c| c.len() == d))
                    })
            });
        if !shape_ok {
            return Err(Error::InvalidParameter("form solution coefficient arrays are ragged".into()));
        }

        let bilinear = bilinear
            .into_iter()
            .map(|m| {
                let mut s = vec![vec![0.0; d]; d];
                for i in 0..d {
                    for j in 0..d {
                        s[i][j] = 0.5 * (m[i][j] + m[j][i]);
                    }
                }
                s
            })
            .collect();

        let quartic = quartic
            .into_iter()
            .map(|t| {
                let mut s = vec![vec![vec![vec![0.0; d]; d]; d]; d];
                let perms = permutations4();
                for i in 0..d {
                    for j in 0..d {
                        for k in 0..d {
                            for l in 0..d {
                                let idx = [i, j, k, l];
                                let mut acc = 0.0;
                                for perm in &perms {
                                    acc += t[idx[perm[0]]][idx[perm[1]]][idx[perm[2]]][idx[perm[3]]];
                                }
                                s[i][j][k][l] = acc / 24.0;
                            }
                        }
                    }
                }
                s
            })
            .collect();

        Ok(Self { bilinear, quartic })
    }

    pub fn domain_dim(&self) -> usize {
        self.bilinear[0].len()
    }

    pub fn target_dim(&self) -> usize {
        self.bilinear.len()
    }

    pub fn eval(&self, x: &[f64]) -> YVector {
        let d = self.domain_dim();
        let mut out = Vec::with_capacity(self.target_dim());
        for c in 0..self.target_dim() {
            let mut v = 0.0;
            for i in 0..d {
                for j in 0..d {
                    v += self.bilinear[c][i][j] * x[i] * x[j];
                }
            }
            for i in 0..d {
                for j in 0..d {
                    let xij = x[i] * x[j];
                    for k in 0..d {
                        for l in 0..d {
                            v += self.quartic[c][i][j][k][l] * xij * (x[k] * x[l]);
                        }
                    }
                }
            }
            out.push(v);
        }
        YVector::new(out)
    }

    pub fn sample_fn(&self, p: f64) -> Result<SampleFn> {
        let target = QuasiNormSpec::new(self.target_dim(), p)?;
        let me = self.clone();
        SampleFn::new(self.domain_dim(), target, "form_solution", move |x| me.eval(x))
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    let idx = [0, 1, 2, 3];
    for a in 0..4 {
        for b in 0..4 {
            if b == a {
                continue;
            }
            for c in 0..4 {
                if c == a || c == b {
                    continue;
                }
                let dd = 6 - a - b - c;
                out.push([idx[a], idx[b], idx[c], idx[dd]]);
            }
        }
    }
    out
}
