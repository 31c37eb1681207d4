//! Direction of divergence from the initial values alone, compared with the
//! first terms of the sequence.

use zlrr::analysis::predict_divergence;
use zlrr::poly::{int, rat};
use zlrr::recurrence::Recurrence;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rec = Recurrence::from_i64s(&[0, 2, 1])?;
    let starts = [
        vec![int(3), int(-2), int(1)],
        vec![int(1), int(-1), int(1)],
        vec![rat(1, 2), int(0), int(0)],
    ];
    for init in starts {
        let verdict = predict_divergence(&rec, &init)?;
        let terms = rec.iterate_terms(&init, 14)?.terms;
        let shown: Vec<String> = terms.iter().map(ToString::to_string).collect();
        println!("{}", verdict);
        println!("  d = {:?}", verdict.d.iter().map(ToString::to_string).collect::<Vec<_>>());
        println!("  a = {}", shown.join(", "));
    }
    Ok(())
}
