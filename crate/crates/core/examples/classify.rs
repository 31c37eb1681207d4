//! Classification of a few recurrences, including rejected ones.

use zlrr::recurrence::Recurrence;

fn main() {
    let inputs: [&[i64]; 6] = [&[1, 1], &[0, 1, 1], &[0, 0, 1, 1], &[0, 1, 0, 1], &[2, 0, 0], &[3, -1]];
    for c in inputs {
        match Recurrence::from_i64s(c) {
            Ok(rec) => println!(
                "{c:?}: {}, P(x) = {}, {}",
                rec.classification(),
                rec.characteristic_polynomial(),
                rec.relation_string("G")
            ),
            Err(e) => println!("{c:?}: {e}"),
        }
    }
}
