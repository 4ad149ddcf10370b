//! Betti numbers of the d-torus along its congruence towers.
//!
//! The covers of T^d attached to (Z/p^n)^d are tori again, so every level
//! reports b_j = C(d, j) and the p-adic limit is the same binomial
//! coefficient, independent of p.

use num_bigint::BigInt;
use padic_betti::complexes::torus;
use padic_betti::engine::{approximate, ApproximateOptions, FieldSpec, InvariantKind};
use padic_betti::groups::{tower_abelian, AbelianImage};

fn main() {
    let d = 2;
    let x = torus(d);
    let images: Vec<AbelianImage> = (0..d)
        .map(|i| {
            let mut coords = vec![0i64; d];
            coords[i] = 1;
            AbelianImage::new(0, coords)
        })
        .collect();

    // window 2 and a raised level budget keep the deep p = 5 levels in play
    let opts = ApproximateOptions { window: 2, budget: 60_000, ..Default::default() };
    for p in [2u64, 3, 5] {
        let tower = tower_abelian(1, p, d, 3, &images).expect("tower");
        println!("p = {p}");
        for j in 0..=d {
            let kind = InvariantKind::Betti { degree: j, field: FieldSpec::Q };
            let seq = approximate(&x, &tower, kind, &opts).expect("approximation");
            let values: Vec<&BigInt> = seq.levels.iter().map(|l| &l.value).collect();
            println!(
                "  b_{j} per level {values:?}  ->  {} (mod {}^{})",
                seq.limit.residue.as_ref().expect("converged"),
                p,
                seq.limit.precision
            );
        }
    }
}
