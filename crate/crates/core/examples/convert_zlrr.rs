//! Derived PLRR of a ZLRR.
//!
//! Usage: cargo run --example convert_zlrr -- 0,0,1,1 [n]

use zlrr::recurrence::Recurrence;
use zlrr::zeroing::{derive_plrr, DEFAULT_BUDGET};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let coeffs = args.next().unwrap_or_else(|| "0,0,1,1".to_string());
    let n: u64 = args.next().map_or(Ok(1), |s| s.parse())?;
    let c = coeffs.split(',').map(|s| s.trim().parse()).collect::<Result<Vec<i64>, _>>()?;
    let rec = Recurrence::from_i64s(&c)?;
    println!("{}: {}", rec.classification(), rec.relation_string("G"));

    let d = derive_plrr(&rec, n, DEFAULT_BUDGET)?;
    println!("characteristic polynomial: {}", rec.characteristic_polynomial());
    println!("derived polynomial: {}", d.p);
    println!("quotient: {}", d.quotient);
    println!("plain steps t0 = {}", d.t0);
    if let Some(h) = &d.derived_recurrence {
        println!("{}: {}", h.classification(), h.relation_string("H"));
    }
    Ok(())
}
