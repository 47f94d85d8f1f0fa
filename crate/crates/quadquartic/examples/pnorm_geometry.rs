//! Geometry of l^p spaces with 0 < p <= 1: quasi-norms, the power-sum
//! inequality, and the modulus of concavity.

use anyhow::Result;
use quadquartic::{estimate_modulus, power_sum_check, QuasiNormSpec, YVector};

fn main() -> Result<()> {
    // For p < 1 the triangle inequality fails, but a weakened form holds:
    // ||v + w|| <= M (||v|| + ||w||) with M = 2^{1/p - 1}.
    println!("{:>6} {:>12} {:>12} {:>14}", "p", "analytic M", "estimated M", "ratio at e1,e2");
    for p in [1.0, 0.75, 0.5, 0.25] {
        let space = QuasiNormSpec::new(2, p)?;
        let estimated = estimate_modulus(&space, 4000, 11);
        let e1 = YVector::new(vec![1.0, 0.0]);
        let e2 = YVector::new(vec![0.0, 1.0]);
        let ratio = space.norm(&e1.add(&e2)) / (space.norm(&e1) + space.norm(&e2));
        println!(
            "{p:>6} {:>12.6} {estimated:>12.6} {ratio:>14.6}",
            space.modulus_of_concavity()
        );
    }

    // The failure of the triangle inequality is exactly the power-sum
    // inequality (sum x_i)^p <= sum x_i^p for nonnegative x_i.
    for p in [0.5, 0.25] {
        for xs in [vec![1.0, 1.0], vec![2.0, 3.0, 4.0], vec![0.1, 0.9]] {
            let lhs = xs.iter().sum::<f64>().powf(p);
            let rhs = xs.iter().map(|v| v.powf(p)).sum::<f64>();
            assert!(power_sum_check(&xs, p));
            println!("p = {p}: ({xs:?} summed)^p = {lhs:.4} <= {rhs:.4} = sum of powers");
        }
    }

    // p-th powers of the quasi-norm are subadditive, which is what the
    // series bounds in this crate are built on.
    let space = QuasiNormSpec::new(3, 0.5)?;
    let v = YVector::new(vec![1.0, -2.0, 0.5]);
    let w = YVector::new(vec![0.25, 1.0, -1.0]);
    let lhs = space.norm(&v.add(&w)).powf(0.5);
    let rhs = space.norm(&v).powf(0.5) + space.norm(&w).powf(0.5);
    println!("p-power subadditivity at p = 0.5: {lhs:.6} <= {rhs:.6}");
    Ok(())
}
