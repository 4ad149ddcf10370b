//! Frattini series of small p-groups and the stabilize-or-grow dichotomy
//! along a Frattini tower.

use num_bigint::BigUint;
use padic_betti::atiyah::{dichotomy_check, GrowthVerdict, KField};
use padic_betti::complexes::{torus, wedge_of_circles};
use padic_betti::engine::{betti_at_level, FieldSpec};
use padic_betti::groups::{
    abelian_table, cyclic_table, dihedral8, frattini_series, heisenberg, quaternion8,
    tower_frattini,
};

fn main() {
    // Phi(G) = [G,G] G^p; the series length is the number of steps to reach 1
    let examples: Vec<(&str, _, u64)> = vec![
        ("C8", cyclic_table(8), 2),
        ("C2 x C4", abelian_table(&[2, 4]), 2),
        ("D8", dihedral8(), 2),
        ("Q8", quaternion8(), 2),
        ("Heis(3)", heisenberg(3), 3),
    ];
    for (name, g, p) in examples {
        let series = frattini_series(&g, p).expect("series");
        let orders: Vec<usize> = std::iter::once(g.order)
            .chain(series.iter().map(|s| s.len()))
            .collect();
        println!("{name}: subgroup orders {orders:?}, Frattini length {}", series.len());
    }

    // dichotomy along the Frattini tower of (Z/16)^2: the torus b1 sequence
    // is constant, the free group b1 = 1 + |Q| meets the 2^(n+1-c) bound
    let p = 2u64;
    let tower = tower_frattini(&abelian_table(&[16, 16]), p).expect("tower");
    for (name, complex) in [("torus", torus(2)), ("free of rank 2", wedge_of_circles(2))] {
        let seq: Vec<BigUint> = tower
            .levels
            .iter()
            .map(|q| BigUint::from(betti_at_level(&complex, q, FieldSpec::Q, 1).expect("b1")))
            .collect();
        let rep = dichotomy_check(&seq, &KField::Q, p, 2).expect("dichotomy");
        let verdict = match rep.verdict {
            GrowthVerdict::Stabilized => "stabilized",
            GrowthVerdict::FastGrowth => "fast growth",
            GrowthVerdict::Inconclusive => "inconclusive",
        };
        println!("{name}: b1 per level {seq:?} -> {verdict}");
    }
}
