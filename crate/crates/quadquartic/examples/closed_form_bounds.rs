//! Compare the three ways to evaluate a stability bound: the truncated
//! dyadic series, its geometric closed form, and the printed closed-form
//! constants, across control shapes and space exponents.

use anyhow::Result;
use quadquartic::{
    admissible_direction, corollary_bound, corollary_quart_power_y_as_printed, theorem_bound,
    theorem_bound_truncated, BoundFlavor, BoundParams, Component, Perturbation,
};

fn main() -> Result<()> {
    let x = [1.0];
    let controls = [
        ("constant", Perturbation::constant(1.0)),
        ("power_x r=3", Perturbation::power_x(1.0, 3.0)),
        ("power_y s=1", Perturbation::power_y(1.0, 1.0)),
        ("power_sum r=s=5", Perturbation::power_sum(1.0, 5.0, 5.0)),
        ("power_product 1x2", Perturbation::power_product(1.0, 1.0, 2.0)),
    ];

    for p in [1.0, 0.5] {
        let bp = BoundParams::new(2, p)?;
        println!("p = {p} (modulus of concavity M = {}):", bp.modulus);
        for (label, phi) in &controls {
            for flavor in [BoundFlavor::Quadratic, BoundFlavor::Quartic, BoundFlavor::Mixed] {
                let component = match flavor {
                    BoundFlavor::Quadratic => Some(Component::Quadratic),
                    BoundFlavor::Quartic => Some(Component::Quartic),
                    BoundFlavor::Mixed => None,
                };
                // Single flavors need an explicit direction; mixed resolves
                // each part internally.
                let dir = match component {
                    Some(c) => match admissible_direction(c, phi) {
                        Ok(d) => d,
                        Err(e) => {
                            println!("  {label:>18} {flavor:?}: {e}");
                            continue;
                        }
                    },
                    None => match (
                        admissible_direction(Component::Quadratic, phi),
                        admissible_direction(Component::Quartic, phi),
                    ) {
                        (Ok(d), Ok(_)) => d,
                        (Err(e), _) | (_, Err(e)) => {
                            println!("  {label:>18} {flavor:?}: {e}");
                            continue;
                        }
                    },
                };
                let truncated = theorem_bound_truncated(flavor, dir, phi, &bp, &x)?;
                let closed = theorem_bound(flavor, dir, phi, &bp, &x)?;
                let coro = corollary_bound(flavor, phi, &bp, &x)?;
                println!(
                    "  {label:>18} {flavor:?}: truncated {truncated:.9e}  closed {closed:.9e}  constant {coro:.9e}"
                );
            }
        }
        // One printed constant disagrees with the pattern of its siblings;
        // both readings are available for comparison.
        let phi = Perturbation::power_y(1.0, 1.0);
        let printed = corollary_quart_power_y_as_printed(&phi, &bp, &x)?;
        let pattern = corollary_bound(BoundFlavor::Quartic, &phi, &bp, &x)?;
        println!("  quartic power_y s=1: as printed {printed:.9e}, pattern-consistent {pattern:.9e}");
        println!();
    }
    Ok(())
}
