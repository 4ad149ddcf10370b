//! Torsion growth for flat torus bundles: tower versus closed form.
//!
//! For the mapping torus of A on T^N, |tors H^2| at level n is
//! |det(A^{p^n} - 1)|, and when no eigenvalue is a root of unity the p-adic
//! limit exists and equals +/- det(log A) / det(A - 1) * (p-part correction),
//! computed here entirely with truncated p-adic matrix logarithms. The two
//! routes are independent and must agree.

use padic_betti::fab::{
    check_a1, epsilon_sign, fab_example_matrix, log_limit_check, torsion_approx,
    torsion_closed_form,
};

fn main() {
    let p = 5u64;
    let a = fab_example_matrix(p); // [[1 + p^2, p], [p, 1]], det = 1

    let cert = check_a1(&a).expect("charpoly");
    println!(
        "no eigenvalue is a root of unity: {} (characteristic polynomial {:?})",
        cert.holds, cert.charpoly
    );

    let seq = torsion_approx(&a, p, 3, 4, 2).expect("tower route");
    for (n, (v, s)) in seq.values.iter().zip(&seq.signs).enumerate() {
        println!("level {n}: |tors| = {v}   sign of det(A^(p^{n}) - 1) = {s}");
    }
    println!("tower limit       {} (mod {p}^{})", seq.limit.residue.as_ref().unwrap(), seq.limit.precision);

    let closed = torsion_closed_form(&a, p, 4).expect("closed form");
    println!("matrix-log route  {} (mod {p}^{})", closed.residue.as_ref().unwrap(), closed.precision);
    assert!(seq.limit.agrees_with(&closed));

    println!("epsilon = {}", epsilon_sign(&a, p).expect("sign"));
    let vals = log_limit_check(&a, p, 4, 6).expect("log limit");
    println!("v_p(t_n - t_infinity) per level: {vals:?} (grows at least linearly)");
}
