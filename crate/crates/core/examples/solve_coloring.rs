//! Scrambles a coloring and solves it, for a few values of k.
//!
//! cargo run --example solve_coloring -- [diagram] [seed]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use region_select::algebra::Modulus;
use region_select::catalog::Catalog;
use region_select::game::{build_game_matrix, Coloring, GameConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "5_2".into());
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed is an integer"));
    let shadow: Arc<_> = Catalog::builtin().get(&name).unwrap_or_else(|| panic!("no diagram {name}")).clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for k in [Modulus::Finite(2), Modulus::Finite(3), Modulus::Finite(7), Modulus::Infinite] {
        let gm = build_game_matrix(shadow.clone(), GameConfig::new(k)).expect("knot diagram");
        let hi = k.value().map_or(10, |k| k as i64);
        let lo = if k.is_finite() { 0 } else { -hi };
        let values: Vec<i64> = (0..gm.vertex_count()).map(|_| rng.gen_range(lo..hi)).collect();
        let coloring = Coloring::from_i64s(&values);
        let pattern = gm.solve(&coloring).expect("every coloring is solvable");
        let after = gm.apply_pattern(&coloring, &pattern).unwrap();
        println!(
            "k={k}: coloring {values:?} -> push {:?} (regions {:?} unpushed), result zero: {}",
            pattern.0.iter().map(ToString::to_string).collect::<Vec<_>>(),
            gm.pinned_pair(),
            after.is_zero()
        );
    }
}
