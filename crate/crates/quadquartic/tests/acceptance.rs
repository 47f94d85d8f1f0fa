//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS line (visible with --nocapture; the test harness line itself is the
//! pass/fail record). Tolerances are part of the contract and are asserted
//! exactly as stated.

use std::time::Instant;

use quadquartic::{
    admissible_direction, approximant, certify, corollary_bound, empirical_theta,
    estimate_modulus, homogeneity_check, identity_probe, ineq_holds, make_exact, make_perturbed,
    mixed_decomposition, power_sum_check, residual_probe, series_budget, theorem_bound,
    theorem_bound_truncated, BoundFlavor, BoundParams, Component, Direction, EquationParams,
    Error, GridSpec, Identity, IterBudget, IterationConfig, NoiseShape, NoiseSpec, Perturbation,
    QuasiNormSpec, SampleFn, YVector,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SOLUTIONS: [(f64, f64); 4] = [(1.0, 1.0), (3.0, -2.0), (0.0, 1.0), (1.0, 0.0)];
const SCALES: [i64; 4] = [2, 3, -2, 5];

fn grid_points() -> Vec<Vec<f64>> {
    GridSpec::default().axis_points(1).unwrap()
}

fn grid_pairs() -> Vec<(Vec<f64>, Vec<f64>)> {
    GridSpec::default().axis_pairs(1).unwrap()
}

fn noisy_instance() -> SampleFn {
    let base = make_exact(1.0, 1.0, 1.0).unwrap();
    make_perturbed(
        &base,
        &NoiseSpec { amplitude: 1e-3, shape: NoiseShape::BoundedOscillation, seed: 1234 },
    )
    .unwrap()
}

#[test]
fn a01_exact_solution_residual_vanishes_on_the_grid() {
    let t0 = Instant::now();
    let pairs = grid_pairs();
    for (a, b) in SOLUTIONS {
        for n in SCALES {
            let f = make_exact(a, b, 1.0).unwrap();
            let eq = EquationParams::new(n).unwrap();
            let space = f.target();
            let mut max_residual: f64 = 0.0;
            let mut max_magnitude: f64 = 0.0;
            for (x, y) in &pairs {
                let probe = residual_probe(&f, &eq, x, y).unwrap();
                max_residual = max_residual.max(probe.residual_norm(&space));
                max_magnitude = max_magnitude.max(probe.magnitude);
            }
            assert!(
                max_residual <= 1e-9 * (1.0 + max_magnitude),
                "(a, b) = ({a}, {b}), n = {n}: max residual {max_residual:e}"
            );
        }
    }
    println!(
        "acceptance 01 exact-solution residual: PASS ({} ms)",
        t0.elapsed().as_millis()
    );
}

#[test]
fn a02_decomposition_recovers_coefficients_with_constant_traces() {
    let cfg_q = IterationConfig {
        m_max: 24,
        tol: 1e-10,
        direction: Direction::Grow,
        target: Component::Quadratic,
    };
    let cfg_t = IterationConfig { target: Component::Quartic, ..cfg_q };
    for (a, b) in SOLUTIONS {
        let f = make_exact(a, b, 1.0).unwrap();
        for x in &grid_points() {
            let parts = mixed_decomposition(&f, &cfg_q, &cfg_t, x).unwrap();
            let xv = x[0];
            let want_q = b * xv * xv;
            let want_t = a * xv * xv * xv * xv;
            let got_q = parts.quadratic.coords()[0];
            let got_t = parts.quartic.coords()[0];
            assert!(
                (got_q - want_q).abs() <= 1e-10 * (1.0 + want_q.abs()),
                "quadratic part at {xv}: {got_q} vs {want_q}"
            );
            assert!(
                (got_t - want_t).abs() <= 1e-10 * (1.0 + want_t.abs()),
                "quartic part at {xv}: {got_t} vs {want_t}"
            );
            let fx = f.eval(x).unwrap().coords()[0];
            let rec = parts.recombined().coords()[0];
            assert!((rec - fx).abs() <= 1e-10 * (1.0 + fx.abs()));

            // Trace constancy: every rescaled dyadic evaluation of a part
            // is bitwise the same number, in both scaling directions.
            for component in [Component::Quadratic, Component::Quartic] {
                let part = component.transform(&f);
                let w = component.weight();
                let s0 = part.eval(x).unwrap().coords()[0];
                for m in 1..=10 {
                    let grow = part.eval(&[xv * (m as f64).exp2()]).unwrap().coords()[0]
                        * w.powi(-m);
                    let shrink = part.eval(&[xv * (-(m as f64)).exp2()]).unwrap().coords()[0]
                        * w.powi(m);
                    assert!(
                        grow.to_bits() == s0.to_bits() && shrink.to_bits() == s0.to_bits(),
                        "trace varies at x = {xv}, m = {m}"
                    );
                }
            }
        }
    }
    println!("acceptance 02 decomposition exactness: PASS");
}

#[test]
fn a03_identity_suite_holds_on_exact_solutions() {
    let pairs = grid_pairs();
    for (a, b) in SOLUTIONS {
        let f = make_exact(a, b, 1.0).unwrap();
        let space = f.target();
        for n in SCALES {
            let eq = EquationParams::new(n).unwrap();
            for identity in Identity::ALL {
                for (x, y) in &pairs {
                    let probe = identity_probe(&f, identity, &eq, x, y).unwrap();
                    assert!(
                        probe.within(&space, 1e-9),
                        "{} fails for (a, b) = ({a}, {b}), n = {n} at ({}, {})",
                        identity.name(),
                        x[0],
                        y[0]
                    );
                }
            }
        }
    }
    // Double-step readout, exactly: f(4) = 20 f(2) - 64 f(1) = 272 for
    // f = x^4 + x^2.
    let f = make_exact(1.0, 1.0, 1.0).unwrap();
    let f4 = f.eval(&[4.0]).unwrap().coords()[0];
    let f2 = f.eval(&[2.0]).unwrap().coords()[0];
    let f1 = f.eval(&[1.0]).unwrap().coords()[0];
    assert_eq!(f4, 272.0);
    assert_eq!(f4, 20.0 * f2 - 64.0 * f1);
    println!("acceptance 03 identity suite: PASS");
}

#[test]
fn a04_power_sum_inequality_has_no_random_violations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0usize;
    for _ in 0..10_000 {
        let len = rng.random_range(1..=8);
        let xs: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..10.0)).collect();
        let p = rng.random_range(0.05..=1.0);
        assert!(power_sum_check(&xs, p), "violation at xs = {xs:?}, p = {p}");
        checked += 1;
    }
    assert_eq!(checked, 10_000);
    println!("acceptance 04 power-sum inequality: PASS (10000 cases)");
}

#[test]
fn a05_pnorm_kernel_properties_hold_at_scale() {
    let dims = [1usize, 2, 5];
    for p in [1.0f64, 0.75, 0.5, 0.25] {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let modulus = (1.0 / p - 1.0).exp2();
        for i in 0..10_000 {
            let dim = dims[i % dims.len()];
            let space = QuasiNormSpec::new(dim, p).unwrap();
            let v = YVector::new((0..dim).map(|_| rng.random_range(-5.0..5.0)).collect());
            let w = YVector::new((0..dim).map(|_| rng.random_range(-5.0..5.0)).collect());
            let nv = space.norm(&v);
            let nw = space.norm(&w);
            let nvw = space.norm(&v.add(&w));
            assert!(
                ineq_holds(nvw.powf(p), nv.powf(p) + nw.powf(p)),
                "p-power subadditivity fails: p = {p}, v = {v:?}, w = {w:?}"
            );
            assert!(
                ineq_holds(nvw, modulus * (nv + nw)),
                "quasi-triangle fails: p = {p}, v = {v:?}, w = {w:?}"
            );
        }
        let space2 = QuasiNormSpec::new(2, p).unwrap();
        let estimated = estimate_modulus(&space2, 4000, 99);
        assert!(estimated <= modulus * (1.0 + 1e-12));
        assert!(
            (estimated - modulus).abs() <= 1e-12 * modulus,
            "p = {p}: estimated {estimated} vs analytic {modulus}"
        );
    }
    println!("acceptance 05 p-norm kernel: PASS (10000 pairs x 4 exponents)");
}

#[test]
fn a06_noisy_solution_is_recovered_by_the_grow_iteration() {
    let t0 = Instant::now();
    let f = noisy_instance();
    let space = f.target();
    for x in &grid_points() {
        for (component, limit) in [
            (Component::Quadratic, -12.0 * x[0] * x[0]),
            (Component::Quartic, 12.0 * x[0] * x[0] * x[0] * x[0]),
        ] {
            let cfg = IterationConfig {
                m_max: 20,
                tol: 1e-10,
                direction: Direction::Grow,
                target: component,
            };
            let run = approximant(&f, &cfg, x).unwrap();
            assert!(run.converged, "{} at {}: tail {:e}", component.name(), x[0], run.tail);
            assert!(run.m_used <= 20);
            let dev = space.norm(&run.value.sub(&YVector::scalar(limit)));
            assert!(
                dev <= 5e-3,
                "{} limit at {}: {} vs {limit} (dev {dev:e})",
                component.name(),
                x[0],
                run.value.coords()[0]
            );
        }
    }
    println!(
        "acceptance 06 noisy recovery: PASS ({} ms)",
        t0.elapsed().as_millis()
    );
}

#[test]
fn a07_certification_passes_for_the_noisy_instance() {
    let f = noisy_instance();
    let eq = EquationParams::new(2).unwrap();
    let theta = empirical_theta(&f, &eq, &Perturbation::constant(1.0), &grid_pairs()).unwrap();
    assert!(theta > 0.0);
    let phi = Perturbation::constant(theta);
    let bp = BoundParams::new(2, 1.0).unwrap();
    let grid = grid_points();
    let iter = IterBudget { m_max: 24, tol: 1e-10 };
    for (flavor, direction) in [
        (BoundFlavor::Quadratic, Some(Direction::Grow)),
        (BoundFlavor::Quartic, Some(Direction::Grow)),
        (BoundFlavor::Mixed, None),
    ] {
        let report = certify(&f, &phi, &bp, &iter, &grid, flavor, direction).unwrap();
        assert!(report.premise_ok, "{flavor:?}: premise failed");
        assert!(report.bound_evaluated);
        assert!(
            report.bound_ok,
            "{flavor:?}: worst ratio {}",
            report.worst_bound_ratio
        );
        assert!(
            report.bound_ok_alt,
            "{flavor:?} at the alternative modulus exponent: worst ratio {}",
            report.worst_bound_ratio_alt
        );
    }
    println!("acceptance 07 theorem-bound certification: PASS (theta = {theta:.3e})");
}

#[test]
fn a08_series_closed_form_and_constants_agree() {
    for p in [1.0, 0.5] {
        let bp = BoundParams::new(2, p).unwrap();
        for (r, s) in [(3.0, 3.0), (1.0, 1.0), (5.0, 5.0)] {
            let phi = Perturbation::power_sum(1.0, r, s);
            for flavor in [BoundFlavor::Quadratic, BoundFlavor::Quartic, BoundFlavor::Mixed] {
                let dir = match flavor {
                    BoundFlavor::Quadratic => {
                        admissible_direction(Component::Quadratic, &phi).unwrap()
                    }
                    BoundFlavor::Quartic => {
                        admissible_direction(Component::Quartic, &phi).unwrap()
                    }
                    // Resolved per part internally.
                    BoundFlavor::Mixed => Direction::Grow,
                };
                for x in [[0.5], [1.0], [1.75]] {
                    let closed = theorem_bound(flavor, dir, &phi, &bp, &x).unwrap();
                    let truncated =
                        theorem_bound_truncated(flavor, dir, &phi, &bp, &x).unwrap();
                    assert!(
                        (closed - truncated).abs() <= 1e-9 * closed.abs(),
                        "p = {p}, (r, s) = ({r}, {s}), {flavor:?} at {x:?}: \
                         closed {closed} vs truncated {truncated}"
                    );
                    let constant = corollary_bound(flavor, &phi, &bp, &x).unwrap();
                    assert!(
                        ineq_holds(truncated, constant),
                        "p = {p}, (r, s) = ({r}, {s}), {flavor:?} at {x:?}: \
                         constant {constant} below truncated {truncated}"
                    );
                }
            }
        }
    }
    println!("acceptance 08 series and closed forms: PASS");
}

#[test]
fn a09_regime_violations_raise_errors_not_numbers() {
    let bp = BoundParams::new(2, 1.0).unwrap();
    let x = [1.0];

    // Constant control in the shrink direction: the series diverges.
    let constant = Perturbation::constant(1.0);
    for component in [Component::Quadratic, Component::Quartic] {
        let err = series_budget(component, Direction::Shrink, &constant, &bp, &x).unwrap_err();
        assert!(matches!(err, Error::Regime(_)), "{err}");
    }
    let err = theorem_bound_truncated(
        BoundFlavor::Quadratic,
        Direction::Shrink,
        &constant,
        &bp,
        &x,
    )
    .unwrap_err();
    assert!(matches!(err, Error::Regime(_)), "{err}");

    // Critical exponents: r + s = 2 on the quadratic chain, r + s = 4 on
    // the quartic chain. No direction converges.
    let crit_q = Perturbation::power_product(1.0, 1.0, 1.0);
    let crit_t = Perturbation::power_product(1.0, 2.0, 2.0);
    for dir in [Direction::Shrink, Direction::Grow] {
        let err = series_budget(Component::Quadratic, dir, &crit_q, &bp, &x).unwrap_err();
        assert!(matches!(err, Error::Regime(_)), "{err}");
        let err = series_budget(Component::Quartic, dir, &crit_t, &bp, &x).unwrap_err();
        assert!(matches!(err, Error::Regime(_)), "{err}");
    }
    assert!(matches!(
        admissible_direction(Component::Quadratic, &crit_q).unwrap_err(),
        Error::Regime(_)
    ));
    assert!(matches!(
        admissible_direction(Component::Quartic, &crit_t).unwrap_err(),
        Error::Regime(_)
    ));
    assert!(matches!(
        corollary_bound(BoundFlavor::Quadratic, &crit_q, &bp, &x).unwrap_err(),
        Error::Regime(_)
    ));
    assert!(matches!(
        corollary_bound(BoundFlavor::Quartic, &crit_t, &bp, &x).unwrap_err(),
        Error::Regime(_)
    ));
    println!("acceptance 09 regime errors: PASS");
}

#[test]
fn a10_approximant_limits_scale_like_their_degree() {
    let f = noisy_instance();
    for component in [Component::Quadratic, Component::Quartic] {
        let cfg = IterationConfig {
            m_max: 20,
            tol: 1e-10,
            direction: Direction::Grow,
            target: component,
        };
        for x in [[0.5], [1.0], [-1.25], [1.75]] {
            let deviation = homogeneity_check(&f, &cfg, &x).unwrap();
            assert!(
                deviation <= 1e-2,
                "{} at {:?}: deviation {deviation:e}",
                component.name(),
                x
            );
        }
    }
    println!("acceptance 10 homogeneity of limits: PASS");
}

#[test]
fn a11_certification_reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    std::fs::write(
        &config_path,
        r#"{
            "function": {"kind": "perturbed", "a": 1.0, "b": 1.0, "amplitude": 1e-4, "seed": 3},
            "control": {"kind": "constant", "fit": true},
            "certify": {"flavor": "mixed"}
        }"#,
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_quadquartic");
    let mut outputs = Vec::new();
    for run in ["one", "two"] {
        let out_dir = dir.path().join(run);
        let status = std::process::Command::new(bin)
            .args(["certify", "--quiet", "--config"])
            .arg(&config_path)
            .arg("--out")
            .arg(&out_dir)
            .status()
            .unwrap();
        assert!(status.success(), "certify run {run} failed");
        outputs.push(std::fs::read(out_dir.join("report.json")).unwrap());
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1], "reports differ between identical runs");
    println!("acceptance 11 report stability: PASS");
}
