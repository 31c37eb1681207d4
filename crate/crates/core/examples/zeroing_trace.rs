//! Step-by-step Zeroing run on `x^3 - 2x - 1` with `Q0 = 3x^2 - 2x - 5`.

use zlrr::poly::{int, Polynomial};
use zlrr::zeroing::{run_zeroing, ZeroingOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: Polynomial = "x^3-2x-1".parse()?;
    let beta = [int(3), int(-2), int(-5)];
    let trace = run_zeroing(&p, &beta, &ZeroingOptions::default())?;
    println!("P(x) = {p}, sign of Q0(r) = {}", trace.sign_q0_at_r());
    for (t, q) in trace.polys().iter().enumerate() {
        println!("Q_{t}(x) = {q}");
    }
    println!("termination: {:?}", trace.termination());
    println!("q(1,t): {:?}", trace.q1_sequence().iter().map(ToString::to_string).collect::<Vec<_>>());
    Ok(())
}
