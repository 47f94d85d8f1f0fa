//! Split a solution into its quadratic and quartic parts.
//!
//! The two doubling transforms isolate the components of a x^4 + b x^2:
//!
//!   g(x) = f(2x) - 16 f(x) = -12 b x^2      (quadratic part, scaled)
//!   h(x) = f(2x) -  4 f(x) =  12 a x^4      (quartic part, scaled)
//!
//! so f = (h - g) / 12 recombines, and evaluating the scaled parts at x = 1
//! reads the coefficients back off.

use anyhow::Result;
use quadquartic::{make_exact, quad_transform, quart_transform, recompose};

fn main() -> Result<()> {
    let (a, b) = (3.0, -2.0);
    let f = make_exact(a, b, 1.0)?;
    let g = quad_transform(&f);
    let h = quart_transform(&f);

    println!("f(x) = {a} x^4 + {b} x^2");
    println!("{:>6} {:>12} {:>12} {:>12}", "x", "g(x)", "h(x)", "(h-g)/12");
    for k in 0..=8 {
        let x = -2.0 + 0.5 * k as f64;
        let gv = g.eval(&[x])?.coords()[0];
        let hv = h.eval(&[x])?.coords()[0];
        let fv = (hv - gv) / 12.0;
        println!("{x:>6} {gv:>12.4} {hv:>12.4} {fv:>12.4}");
    }

    // Coefficient readout at x = 1.
    let b_rec = g.eval(&[1.0])?.coords()[0] / -12.0;
    let a_rec = h.eval(&[1.0])?.coords()[0] / 12.0;
    println!("recovered a = {a_rec}, b = {b_rec}");

    // recompose() packages the same (h - g) / 12 as a function.
    let back = recompose(&g, &h)?;
    let x = [1.25];
    println!(
        "recompose check at x = 1.25: f = {}, recomposed = {}",
        f.eval(&x)?.coords()[0],
        back.eval(&x)?.coords()[0]
    );
    Ok(())
}
