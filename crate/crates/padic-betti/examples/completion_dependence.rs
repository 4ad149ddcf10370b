//! The p-adic Betti numbers depend on which completion of the fundamental
//! group the tower approximates, not just on the group itself.
//!
//! X = S^1 x (S^1 v S^3) has pi_1 = Z^2 and a 4-cell whose contribution to
//! b_4 survives exactly on covers where the loop (omega, 1) dies. Along the
//! line tower (s, t) -> (omega mod p^n, 1) the limit is p^{v_p(omega)};
//! along the full Z_p^2 tower it is 0. Same space, same group, different
//! completions, different answers.

use num_bigint::BigInt;
use padic_betti::complexes::{circle, cw_sphere, product, wedge};
use padic_betti::engine::{approximate, ApproximateOptions, FieldSpec, InvariantKind};
use padic_betti::groups::{tower_abelian, tower_line_from_integer, AbelianImage};

fn main() {
    let x = product(&circle(), &wedge(&circle(), &cw_sphere(3)).expect("wedge")).expect("product");
    let p = 3u64;
    let kind = InvariantKind::Betti { degree: 4, field: FieldSpec::Q };
    let opts = ApproximateOptions { window: 3, ..Default::default() };

    for v in 0..=2u32 {
        let omega = BigInt::from(p).pow(v);
        let tower = tower_line_from_integer(p, 5, &omega).expect("line tower");
        let seq = approximate(&x, &tower, kind.clone(), &opts).expect("b4");
        let values: Vec<String> = seq.levels.iter().map(|l| l.value.to_string()).collect();
        println!(
            "omega = {p}^{v}: b4 per level [{}] -> {}",
            values.join(", "),
            seq.limit.residue.as_ref().unwrap()
        );
    }

    let full = tower_abelian(
        1,
        p,
        2,
        3,
        &[AbelianImage::new(0, vec![1, 0]), AbelianImage::new(0, vec![0, 1])],
    )
    .expect("full tower");
    let seq = approximate(&x, &full, kind, &ApproximateOptions::default()).expect("b4");
    println!("full Z_{p}^2 tower: b4 -> {}", seq.limit.residue.as_ref().unwrap());
}
