//! b1 of a wedge of r circles along p-congruence towers: every level gives
//! the rank formula 1 + |Q|(r - 1), a sequence that converges p-adically
//! to 1 for any r and p.

use padic_betti::complexes::wedge_of_circles;
use padic_betti::engine::{approximate, ApproximateOptions, FieldSpec, InvariantKind};
use padic_betti::groups::{tower_abelian, AbelianImage};

fn main() {
    for r in [2usize, 3] {
        let x = wedge_of_circles(r);
        let images: Vec<AbelianImage> = (0..r)
            .map(|i| {
                let mut coords = vec![0i64; r];
                coords[i] = 1;
                AbelianImage::new(0, coords)
            })
            .collect();
        for p in [2u64, 3] {
            let tower = tower_abelian(1, p, r, 4, &images).expect("tower");
            let opts = ApproximateOptions { budget: 60_000, ..Default::default() };
            let seq = approximate(
                &x,
                &tower,
                InvariantKind::Betti { degree: 1, field: FieldSpec::Q },
                &opts,
            )
            .expect("b1");
            let values: Vec<String> = seq
                .levels
                .iter()
                .map(|l| format!("{} = 1 + {}({})", l.value, l.order, r - 1))
                .collect();
            println!(
                "F_{r}, p = {p}: [{}] -> {} (mod {p}^{})",
                values.join(", "),
                seq.limit.residue.as_ref().unwrap(),
                seq.limit.precision
            );
        }
    }
}
