//! Lists the null patterns of a diagram and, when the unshaded regions can be
//! signed alternately, matches them against the two-parameter family.
//!
//! cargo run --example null_patterns -- [diagram] [k]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use region_select::algebra::Modulus;
use region_select::catalog::Catalog;
use region_select::diagram::Shade;
use region_select::game::{build_game_matrix, GameConfig};
use region_select::structure::alternating_signing;

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "trefoil".into());
    let k: u64 = args.next().map_or(3, |s| s.parse().expect("k is an integer"));
    let shadow = Catalog::builtin().get(&name).unwrap_or_else(|| panic!("no diagram {name}")).clone();
    let gm = build_game_matrix(shadow.clone(), GameConfig::new(Modulus::Finite(k))).expect("knot diagram");
    let kernel = gm.enumerate_null_patterns().expect("small enough to enumerate");
    println!("{name}, k={k}: {} null patterns", kernel.len());
    for p in &kernel {
        println!("  {:?}", p.0.iter().map(ToString::to_string).collect::<Vec<_>>());
    }

    let shading = shadow.checkerboard_shading().unwrap();
    let Some(signing) = alternating_signing(&shadow, &shading, Shade::Unshaded) else {
        println!("the unshaded regions admit no alternating signing");
        return;
    };
    println!("signing of unshaded regions: {:?}", signing.signs);
    let mut family = BTreeSet::new();
    for a in 0..k {
        for b in 0..k {
            let p = gm
                .nullpattern_family_ab(&shading, &signing, &BigInt::from(a), &BigInt::from(b))
                .expect("every member is a null pattern");
            family.insert(p);
        }
    }
    let kernel: BTreeSet<_> = kernel.into_iter().collect();
    println!("family has {} members, equal to the null patterns: {}", family.len(), family == kernel);
}
