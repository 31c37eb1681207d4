//! Plain steps `t0` of the prefix-(1, -1) derivation for `x^(s+2) - x - 1`
//! as the principal root approaches 1.

use zlrr::lab::{slowdown_experiment, slowdown_family};
use zlrr::zeroing::DEFAULT_BUDGET;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let family = slowdown_family(1..=10);
    for (s, rec) in (1..).zip(slowdown_experiment(&family, DEFAULT_BUDGET)?) {
        let t0 = rec.t0.map_or("budget".to_string(), |t| t.to_string());
        let deg = rec.derived_degree.map_or("-".to_string(), |d| d.to_string());
        println!("s = {s:>2}  r = {:.6}  t0 = {t0:>5}  derived degree = {deg}", rec.r);
    }
    Ok(())
}
