//! Smooths the reducible vertices of a diagram and shows the resulting parts.
//!
//! cargo run --example reducing_operation -- [diagram]

use region_select::catalog::Catalog;
use region_select::structure::reduce_diagram;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "trefoil_curl".into());
    let shadow = Catalog::builtin().get(&name).unwrap_or_else(|| panic!("no diagram {name}")).clone();
    let reducible: Vec<usize> = shadow.reducible_vertices().iter().map(|r| r.vertex).collect();
    println!("{name}: {} vertices, reducible {reducible:?}", shadow.vertex_count());
    let reduction = reduce_diagram(&shadow).expect("knot diagram");
    for (i, part) in reduction.components.iter().enumerate() {
        match &part.shadow {
            None => println!("part {i}: loop bounding regions {:?}", part.regions),
            Some(sub) => {
                println!(
                    "part {i}: vertices {:?}, {} regions, reduced: {}",
                    part.vertices,
                    sub.region_count(),
                    sub.is_reduced()
                );
                for (local, &original) in part.region_map.iter().enumerate() {
                    println!("  region {local} lies in original region {original}");
                }
            }
        }
    }
}
