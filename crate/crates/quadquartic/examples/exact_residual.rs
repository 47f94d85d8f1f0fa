//! Evaluate the equation residual for exact solutions and a counterexample.
//!
//! Every function of the form a x^4 + b x^2 satisfies
//!
//!   f(nx+y) + f(nx-y) = n^2 f(x+y) + n^2 f(x-y) + 2 f(nx) - 2 n^2 f(x) - 2 (n^2-1) f(y)
//!
//! for every scale n; the cubic does not.

use anyhow::Result;
use quadquartic::{make_exact, residual_probe, EquationParams, SampleFn};

fn main() -> Result<()> {
    let pairs: Vec<(f64, f64)> = vec![(1.0, 1.0), (0.5, -1.5), (2.0, 0.25), (-1.0, 2.0)];

    for n in [2i64, 3, 5, -2] {
        let eq = EquationParams::new(n)?;
        for (a, b) in [(1.0, 1.0), (3.0, -2.0), (0.0, 7.0)] {
            let f = make_exact(a, b, 1.0)?;
            let space = f.target();
            let mut worst = 0.0f64;
            for &(x, y) in &pairs {
                let probe = residual_probe(&f, &eq, &[x], &[y])?;
                worst = worst.max(probe.residual_norm(&space));
            }
            println!("n = {n:>2}, f = {a} x^4 + {b} x^2: max residual {worst:.3e}");
        }
    }

    // The cubic misses by a wide margin: at n = 2, x = y = 1 the residual
    // is exactly -6.
    let cubic = SampleFn::scalar(1.0, "cubic", |x| x * x * x)?;
    let eq = EquationParams::new(2)?;
    let probe = residual_probe(&cubic, &eq, &[1.0], &[1.0])?;
    println!(
        "cubic at n = 2, (x, y) = (1, 1): residual = {} (|.| = {})",
        probe.residual.coords()[0],
        probe.residual_norm(&cubic.target())
    );
    Ok(())
}
