//! Binet coefficients `1/P'(r_i)` and the reconstructed unit-impulse sequence.

use zlrr::analysis::{binet_squarefree, impulse_terms, reconstruct_terms};
use zlrr::poly::Polynomial;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["x^2-x-1", "x^3-2x-1", "x^4-x-1"] {
        let p: Polynomial = text.parse()?;
        let b = binet_squarefree(&p, 30)?;
        println!("P(x) = {p}");
        for (root, c) in b.roots.roots().iter().zip(&b.coeffs) {
            println!("  r = {:<40} c = {}", root.value.to_string(), c);
        }
        let approx = reconstruct_terms(&b, 12)?;
        let exact = impulse_terms(&p, 12);
        let exact: Vec<String> = exact.iter().map(ToString::to_string).collect();
        println!("  exact  {}", exact.join(" "));
        println!("  binet  {}", approx.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" "));
        println!("  max relative error over n <= 40: {:.1e}", b.max_relative_error(41)?);
    }
    Ok(())
}
