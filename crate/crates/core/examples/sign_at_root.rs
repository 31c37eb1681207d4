//! Exact sign of a polynomial at the principal root, including the case
//! where it vanishes there.

use zlrr::poly::{Polynomial, Rat};
use zlrr::roots::{all_roots_numeric, principal_root, sign_at_principal_root};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: Polynomial = "x^3-2x-1".parse()?;
    let width = Rat::new(1.into(), num_bigint::BigInt::from(10u32).pow(20));
    let enclosure = principal_root(&p, &width)?;
    println!("principal root of {p} lies in {}", enclosure.interval());

    for q in ["3x^2-2x-5", "x^2-x-1", "x-1", "x-2"] {
        let q: Polynomial = q.parse()?;
        println!("sign of {q} at r: {}", sign_at_principal_root(&q, &p)?);
    }

    let roots = all_roots_numeric(&p, 25)?;
    for r in roots.roots() {
        println!("root {} (multiplicity {}, error <= {:.1e})", r.value, r.multiplicity, r.error_bound);
    }
    Ok(())
}
