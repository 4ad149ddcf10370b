//! First Betti numbers of knot complement covers from Alexander polynomials.
//!
//! For the tower of (m p^n)-cyclic covers, b1 = 1 + #{roots of Delta lying
//! in mu(m p^infinity)}, and the count stabilizes at an explicit level. The
//! trefoil's Delta = t^2 - t + 1 has the primitive 6th roots of unity as
//! roots, so everything hinges on whether 6 divides m p^n.

use num_bigint::BigInt;
use padic_betti::cyclic::{knot_b1, parse_int_poly};

fn main() {
    let trefoil: Vec<BigInt> = parse_int_poly("t^2-t+1").expect("trefoil");
    let figure_eight: Vec<BigInt> = parse_int_poly("t^2-3t+1").expect("4_1");

    println!("trefoil, Delta = t^2 - t + 1:");
    for (m, p) in [(1u64, 2u64), (3, 2), (2, 3), (6, 5), (5, 7)] {
        let (b1, roots) = knot_b1(&[trefoil.clone()], m, p).expect("b1");
        let r = &roots[0];
        println!(
            "  m = {m}, p = {p}: b1 = {b1}  ({} roots, stable from level {}, witness order {})",
            r.count, r.stabilized_at, r.witness_order
        );
    }

    // the figure-eight polynomial has no cyclotomic roots at all
    println!("figure eight, Delta = t^2 - 3t + 1:");
    for (m, p) in [(1u64, 2u64), (6, 5), (12, 7)] {
        let (b1, _) = knot_b1(&[figure_eight.clone()], m, p).expect("b1");
        println!("  m = {m}, p = {p}: b1 = {b1}");
    }
}
