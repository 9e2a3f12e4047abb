//! Traces the regions of a diagram file and prints its checkerboard shading.
//!
//! cargo run --example parse_and_trace -- [diagram.json]

use region_select::catalog::Catalog;
use region_select::diagram::{parse_diagram, DiagramShadow};

fn main() {
    let shadow = match std::env::args().nth(1) {
        Some(path) => {
            let text = std::fs::read_to_string(&path).expect("readable diagram file");
            parse_diagram(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
        }
        None => (**Catalog::builtin().get("figure_eight").unwrap()).clone(),
    };
    describe(&shadow);
}

fn describe(shadow: &DiagramShadow) {
    println!(
        "{}: n = {}, m = {}, components = {}",
        shadow.name(),
        shadow.vertex_count(),
        shadow.region_count(),
        shadow.component_count()
    );
    for v in 0..shadow.vertex_count() {
        let mark = if shadow.is_reducible(v) { " (reducible)" } else { "" };
        println!("  vertex {v}: corners {:?}{mark}", shadow.corner_regions(v));
    }
    let shading = shadow.checkerboard_shading().expect("diagram shadows are 2-colorable");
    for r in shadow.regions() {
        println!(
            "  region {}: {}, {} boundary edges, vertices {:?}",
            r.id,
            shading.shade(r.id),
            r.edges.len(),
            r.vertices()
        );
    }
    println!("dual distances:");
    for row in shadow.dual_distances() {
        println!("  {row:?}");
    }
}
