//! The reducing operation, connectedly reducible parts, and alternating signings.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{straight_through, vertex_of, Dart, DiagramError, DiagramShadow, Shade, Shading};

#[derive(Debug, Error, PartialEq)]
pub enum StructureError {
    #[error("smoothed component could not be rebuilt as a diagram: {0}")]
    Component(#[from] DiagramError),
    #[error("irreducible vertex {0} is split across smoothed components")]
    SplitVertex(usize),
    #[error("region of a smoothed component maps to several regions of the diagram")]
    RegionMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// An alternating `+/-` signing of the regions on one side of a shading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignAssignment {
    pub side: Shade,
    pub signs: BTreeMap<usize, Sign>,
}

/// One closed curve of the smoothed diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedComponent {
    /// Irreducible vertices of the original diagram on this curve.
    pub vertices: Vec<usize>,
    /// Original regions whose boundary meets this curve.
    pub regions: Vec<usize>,
    pub is_loop: bool,
    /// The curve as a diagram in its own right; `None` for loops.
    pub shadow: Option<DiagramShadow>,
    /// Component region id -> original region id.
    pub region_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub components: Vec<ReducedComponent>,
    /// Original vertex -> component index; `None` for reducible vertices.
    pub part_of: Vec<Option<usize>>,
}

/// A connectedly reducible part is one component of the smoothed diagram.
pub type Part = ReducedComponent;

/// Orientation of each strand: `out_of[in_dart]` is the dart the strand leaves
/// through after entering at `in_dart`, and `outgoing[d]` marks exit darts.
fn orient(shadow: &DiagramShadow) -> (Vec<bool>, Vec<Dart>) {
    let darts = 4 * shadow.vertex_count();
    let mut outgoing = vec![false; darts];
    let mut seen = vec![false; darts];
    for start in 0..darts {
        if seen[start] {
            continue;
        }
        let mut d = start;
        loop {
            seen[d] = true;
            outgoing[d] = true;
            let arrive = shadow.partner(d);
            seen[arrive] = true;
            d = straight_through(arrive);
            if d == start {
                break;
            }
        }
    }
    let out_of = (0..darts).map(straight_through).collect();
    (outgoing, out_of)
}

/// Applies oriented smoothing at every reducible vertex and splits the result
/// into closed curves. Regions are identified literally between the diagram
/// and its smoothing.
pub fn reduce_diagram(shadow: &DiagramShadow) -> Result<ReductionResult, StructureError> {
    let n = shadow.vertex_count();
    if n == 0 {
        let components = (0..shadow.loop_count())
            .map(|e| {
                let (a, b) = shadow.edge_sides(e);
                ReducedComponent {
                    vertices: Vec::new(),
                    regions: vec![a.min(b), a.max(b)],
                    is_loop: true,
                    shadow: None,
                    region_map: Vec::new(),
                }
            })
            .collect();
        return Ok(ReductionResult {
            components,
            part_of: Vec::new(),
        });
    }

    let (outgoing, mut out_of) = orient(shadow);
    let reducible: BTreeSet<usize> = shadow.reducible_vertices().iter().map(|r| r.vertex).collect();
    for &v in &reducible {
        let ins: Vec<Dart> = (4 * v..4 * v + 4).filter(|&d| !outgoing[d]).collect();
        let (i1, i2) = (ins[0], ins[1]);
        let (o1, o2) = (out_of[i1], out_of[i2]);
        out_of[i1] = o2;
        out_of[i2] = o1;
    }

    // trace the smoothed curves as sequences of exit darts
    let mut curve_of = vec![usize::MAX; 4 * n];
    let mut curves: Vec<Vec<Dart>> = Vec::new();
    for start in (0..4 * n).filter(|&d| outgoing[d]) {
        if curve_of[start] != usize::MAX {
            continue;
        }
        let id = curves.len();
        let mut curve = Vec::new();
        let mut d = start;
        loop {
            curve_of[d] = id;
            curve.push(d);
            let arrive = shadow.partner(d);
            curve_of[arrive] = id;
            d = out_of[arrive];
            if d == start {
                break;
            }
        }
        curves.push(curve);
    }

    let mut part_of = vec![None; n];
    for v in (0..n).filter(|v| !reducible.contains(v)) {
        let c = curve_of[4 * v];
        if (4 * v..4 * v + 4).any(|d| curve_of[d] != c) {
            return Err(StructureError::SplitVertex(v));
        }
        part_of[v] = Some(c);
    }

    let mut components = Vec::with_capacity(curves.len());
    for (id, curve) in curves.iter().enumerate() {
        let vertices: Vec<usize> = (0..n).filter(|&v| part_of[v] == Some(id)).collect();
        if vertices.is_empty() {
            let regions: BTreeSet<usize> = curve
                .iter()
                .flat_map(|&d| {
                    let (a, b) = shadow.edge_sides(shadow.dart_edge(d));
                    [a, b]
                })
                .collect();
            components.push(ReducedComponent {
                vertices,
                regions: regions.into_iter().collect(),
                is_loop: true,
                shadow: None,
                region_map: Vec::new(),
            });
            continue;
        }
        components.push(component_diagram(shadow, id, curve, &vertices, &part_of)?);
    }
    Ok(ReductionResult { components, part_of })
}

/// Rebuilds one smoothed curve as a standalone diagram. Segments between
/// consecutive irreducible vertices become its edges; slot positions at each
/// vertex are kept, so corners correspond one to one.
fn component_diagram(
    shadow: &DiagramShadow,
    id: usize,
    curve: &[Dart],
    vertices: &[usize],
    part_of: &[Option<usize>],
) -> Result<ReducedComponent, StructureError> {
    let on_part = |d: Dart| part_of[vertex_of(d)] == Some(id);
    // rotate so the curve starts at an exit dart of an irreducible vertex
    let first = curve.iter().position(|&d| on_part(d)).expect("component has a vertex");
    let mut dart_label: BTreeMap<Dart, u32> = BTreeMap::new();
    let mut label = 0u32;
    for step in 0..curve.len() {
        let d = curve[(first + step) % curve.len()];
        if on_part(d) {
            label += 1;
            dart_label.insert(d, label);
        }
        let arrive = shadow.partner(d);
        if on_part(arrive) {
            dart_label.insert(arrive, label);
        }
    }
    let local: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let tuples: Vec<[u32; 4]> = vertices
        .iter()
        .map(|&v| std::array::from_fn(|s| dart_label[&(4 * v + s)]))
        .collect();
    let name = format!("{}#{}", shadow.name(), id);
    let sub = DiagramShadow::from_crossings(&name, tuples, 0)?;

    let mut region_map = vec![usize::MAX; sub.region_count()];
    for &v in vertices {
        for s in 0..4 {
            let sub_region = sub.dart_region(4 * local[&v] + s);
            let original = shadow.dart_region(4 * v + s);
            if region_map[sub_region] == usize::MAX {
                region_map[sub_region] = original;
            } else if region_map[sub_region] != original {
                return Err(StructureError::RegionMismatch);
            }
        }
    }
    let regions: BTreeSet<usize> = region_map.iter().copied().collect();
    if regions.len() != region_map.len() {
        return Err(StructureError::RegionMismatch);
    }
    Ok(ReducedComponent {
        vertices: vertices.to_vec(),
        regions: regions.into_iter().collect(),
        is_loop: false,
        shadow: Some(sub),
        region_map,
    })
}

pub fn connectedly_reducible_parts(shadow: &DiagramShadow) -> Result<Vec<Part>, StructureError> {
    Ok(reduce_diagram(shadow)?.components)
}

/// Pairs of `side` regions that must carry opposite signs: at each vertex, the
/// two corners on that side. A pair with equal entries makes signing impossible.
fn sign_constraints(shadow: &DiagramShadow, shading: &Shading, side: Shade) -> Vec<(usize, usize)> {
    (0..shadow.vertex_count())
        .map(|v| {
            let on_side: Vec<usize> = shadow
                .corner_regions(v)
                .into_iter()
                .filter(|&r| shading.shade(r) == side)
                .collect();
            debug_assert_eq!(on_side.len(), 2);
            (on_side[0], on_side[1])
        })
        .collect()
}

/// An alternating signing of the `side` regions, with `+` on the smallest
/// region of each connected group of constrained regions, or `None`.
pub fn alternating_signing(shadow: &DiagramShadow, shading: &Shading, side: Shade) -> Option<SignAssignment> {
    let members = shading.regions_with(side);
    let mut adjacency: BTreeMap<usize, Vec<usize>> = members.iter().map(|&r| (r, Vec::new())).collect();
    for (a, b) in sign_constraints(shadow, shading, side) {
        if a == b {
            return None;
        }
        adjacency.get_mut(&a).unwrap().push(b);
        adjacency.get_mut(&b).unwrap().push(a);
    }
    let mut signs: BTreeMap<usize, Sign> = BTreeMap::new();
    for &root in &members {
        if signs.contains_key(&root) {
            continue;
        }
        signs.insert(root, Sign::Plus);
        let mut queue = VecDeque::from([root]);
        while let Some(r) = queue.pop_front() {
            let s = signs[&r];
            for &t in &adjacency[&r] {
                match signs.get(&t) {
                    None => {
                        signs.insert(t, s.flip());
                        queue.push_back(t);
                    }
                    Some(&ts) if ts == s => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(SignAssignment { side, signs })
}

/// True iff every boundary walk of every region on the side opposite to
/// `side` has even length. Loop boundaries are skipped.
pub fn even_boundary_check(shadow: &DiagramShadow, shading: &Shading, side: Shade) -> bool {
    shadow
        .regions()
        .iter()
        .filter(|r| shading.shade(r.id) == side.opposite())
        .filter(|r| !r.darts.is_empty())
        .all(|r| r.edges.len() % 2 == 0)
}

/// Checks that `signing` is alternating for the given shading.
pub fn is_valid_signing(shadow: &DiagramShadow, shading: &Shading, signing: &SignAssignment) -> bool {
    let members = shading.regions_with(signing.side);
    members.len() == signing.signs.len()
        && members.iter().all(|r| signing.signs.contains_key(r))
        && sign_constraints(shadow, shading, signing.side)
            .into_iter()
            .all(|(a, b)| signing.signs[&a] != signing.signs[&b])
}
