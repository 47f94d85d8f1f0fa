//! Multi-dimensional solutions and the polarization identities that
//! reconstruct their building blocks.
//!
//! On R^d every solution is q + h where q is the diagonal of a symmetric
//! bilinear form and h the diagonal of a symmetric 4-linear form. Both
//! diagonals can be inverted: B(x, y) = (q(x+y) - q(x-y)) / 4 and a 16-term
//! alternating sum recovers D(x1, x2, x3, x4) from h.

use anyhow::Result;
use quadquartic::{
    biadditive_form, polarize_quartic, quad_transform, quart_transform, residual_probe,
    EquationParams, FormSolution,
};

fn main() -> Result<()> {
    // One target coordinate on a two-dimensional domain:
    // q(x) = x0^2 + x0 x1 + 2 x1^2, h(x) with a few quartic couplings.
    let bilinear = vec![vec![vec![1.0, 0.5], vec![0.5, 2.0]]];
    let mut quartic = vec![vec![vec![vec![vec![0.0; 2]; 2]; 2]; 2]];
    quartic[0][0][0][0][0] = 1.0; // x0^4
    quartic[0][1][1][1][1] = 0.5; // 0.5 x1^4
    quartic[0][0][0][1][1] = 0.25; // symmetrized into x0^2 x1^2
    let form = FormSolution::new(bilinear, quartic)?;
    let f = form.sample_fn(0.5)?;

    // It really is a solution, for every scale n.
    for n in [2i64, 3] {
        let eq = EquationParams::new(n)?;
        let probe = residual_probe(&f, &eq, &[0.75, -0.5], &[1.25, 2.0])?;
        println!("n = {n}: residual norm = {:.3e}", probe.residual_norm(&f.target()));
    }

    // Extract the parts, then invert their diagonals.
    let g = quad_transform(&f); // -12 q
    let h = quart_transform(&f); // 12 h
    let x = [1.0, 0.0];
    let y = [0.0, 1.0];

    // B(x, y) recovers the off-diagonal bilinear coefficient: q has
    // x0 x1 coupling 1.0 = 2 * B(e0, e1).
    let b = biadditive_form(&g, &x, &y)?;
    println!("bilinear coupling from polarization: {}", b.coords()[0] / -12.0 * 2.0);

    // The 4-linear form evaluated on mixed arguments exposes the symmetrized
    // quartic coupling; on equal arguments it returns the diagonal.
    let d_mixed = polarize_quartic(&h, [&x, &x, &y, &y])?;
    println!("4-linear D(e0, e0, e1, e1) * 6 = {}", d_mixed.coords()[0] / 12.0 * 6.0);
    let d_diag = polarize_quartic(&h, [&x, &x, &x, &x])?;
    println!(
        "diagonal check: D(e0,..,e0) = {} vs h contribution {}",
        d_diag.coords()[0] / 12.0,
        1.0
    );
    Ok(())
}
