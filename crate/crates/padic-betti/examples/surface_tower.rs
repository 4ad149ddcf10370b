//! A genus-2 surface along the 2-adic congruence tower of its abelianized
//! fundamental group. Covers are surfaces of genus |Q| + 1, so b1 grows like
//! 2|Q| + 2 yet converges 2-adically to 2, while the Euler characteristic
//! -2|Q| converges to 0.

use padic_betti::complexes::surface;
use padic_betti::engine::{
    approximate, euler_padic, ApproximateOptions, FieldSpec, InvariantKind,
};
use padic_betti::groups::{tower_abelian, AbelianImage};

fn main() {
    let g = 2;
    let x = surface(g);
    let images: Vec<AbelianImage> = (0..2 * g)
        .map(|i| {
            let mut coords = vec![0i64; 2 * g];
            coords[i] = 1;
            AbelianImage::new(0, coords)
        })
        .collect();
    let tower = tower_abelian(1, 2, 2 * g, 3, &images).expect("tower");
    let opts = ApproximateOptions { budget: 30_000, ..Default::default() };

    for j in 0..=2 {
        let kind = InvariantKind::Betti { degree: j, field: FieldSpec::Q };
        let seq = approximate(&x, &tower, kind, &opts).expect("betti");
        print!("b_{j}:");
        for lv in &seq.levels {
            print!("  {} (|Q| = {})", lv.value, lv.order);
        }
        println!("  ->  {} (mod 2^{})", seq.limit.residue.as_ref().unwrap(), seq.limit.precision);
    }

    let euler = euler_padic(&x, &tower, &opts).expect("euler");
    let values: Vec<String> = euler.levels.iter().map(|l| l.value.to_string()).collect();
    println!(
        "chi * |Q|: {}  ->  {} (alternating-sum identity checked: {})",
        values.join(", "),
        euler.limit.residue.as_ref().unwrap(),
        euler.checks.euler.unwrap()
    );
}
