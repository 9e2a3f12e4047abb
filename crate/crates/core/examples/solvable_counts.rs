//! Counts colorings solvable without pushing a region set S, for every S of
//! at most two regions.
//!
//! cargo run --example solvable_counts -- [diagram] [k]

use std::collections::BTreeSet;

use region_select::algebra::Modulus;
use region_select::catalog::Catalog;
use region_select::game::{build_game_matrix, GameConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "figure_eight".into());
    let k: u64 = args.next().map_or(2, |s| s.parse().expect("k is an integer"));
    let shadow = Catalog::builtin().get(&name).unwrap_or_else(|| panic!("no diagram {name}")).clone();
    let gm = build_game_matrix(shadow.clone(), GameConfig::new(Modulus::Finite(k))).expect("knot diagram");
    let kernel = gm.enumerate_null_patterns().unwrap();
    let shading = shadow.checkerboard_shading().unwrap();
    let m = shadow.region_count();
    println!("{name}, k={k}: {} colorings in all", (k as u128).pow(shadow.vertex_count() as u32));
    for a in 0..m {
        for b in a + 1..m {
            let s = BTreeSet::from([a, b]);
            let count = gm.count_from_kernel(&kernel, &s).unwrap();
            let relation = if shadow.are_adjacent(a, b) {
                "adjacent".to_string()
            } else {
                format!("{} and {}, distance {}", shading.shade(a), shading.shade(b), shadow.dual_distance(a, b).unwrap())
            };
            println!("  S = {{{a},{b}}} ({relation}): j = {}, q = {}", count.j, count.q);
        }
    }
}
