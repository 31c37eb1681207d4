//! Prints the principal-coefficient formula next to `q(1,t) / r^t` for a
//! characteristic polynomial with a repeated root. Nothing is asserted.

use zlrr::lab::repeated_root_probe;
use zlrr::poly::{int, Polynomial};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // (x - 3)(x + 1)^2
    let p: Polynomial = "x^3-x^2-5x-3".parse()?;
    repeated_root_probe(&p, &[int(1), int(-2), int(-4)], 60, &mut std::io::stdout())?;
    Ok(())
}
