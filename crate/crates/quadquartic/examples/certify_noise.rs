//! Certify a stability bound for a noisy near-solution, end to end.
//!
//! The pipeline: fit the smallest constant control dominating the residual
//! on a grid, check the domination premise on every grid pair, run the
//! approximation scheme at every grid point, and compare the distance to
//! the recovered solution against the certified bound.

use anyhow::Result;
use quadquartic::{
    certify, empirical_theta, make_exact, make_perturbed, BoundFlavor, BoundParams,
    EquationParams, GridSpec, IterBudget, NoiseShape, NoiseSpec, Perturbation,
};

fn main() -> Result<()> {
    let base = make_exact(1.0, 1.0, 1.0)?;
    let noisy = make_perturbed(
        &base,
        &NoiseSpec { amplitude: 1e-5, shape: NoiseShape::BoundedOscillation, seed: 7 },
    )?;

    let eq = EquationParams::new(2)?;
    let grid = GridSpec::default();
    let pairs = grid.axis_pairs(1)?;
    let theta = empirical_theta(&noisy, &eq, &Perturbation::constant(1.0), &pairs)?;
    println!("fitted control amplitude theta = {theta:.6e}");

    let phi = Perturbation::constant(theta);
    let bp = BoundParams::new(2, 1.0)?;
    let report = certify(
        &noisy,
        &phi,
        &bp,
        &IterBudget::default(),
        &grid.axis_points(1)?,
        BoundFlavor::Mixed,
        None,
    )?;

    println!("premise ok:        {}", report.premise_ok);
    println!("worst premise ratio: {:.6}", report.worst_premise_ratio);
    println!("bound ok:          {}", report.bound_ok);
    println!("worst bound ratio:  {:.3e}", report.worst_bound_ratio);
    println!(
        "directions: quadratic {:?}, quartic {:?}",
        report.direction_quadratic, report.direction_quartic
    );

    // A control amplitude below the residual must be rejected: the premise
    // fails and no bound is claimed.
    let undersized = Perturbation::constant(theta / 2.0);
    let rejected = certify(
        &noisy,
        &undersized,
        &bp,
        &IterBudget::default(),
        &grid.axis_points(1)?,
        BoundFlavor::Mixed,
        None,
    )?;
    println!(
        "with theta/2: premise ok = {}, bound evaluated = {}",
        rejected.premise_ok, rejected.bound_evaluated
    );
    Ok(())
}
