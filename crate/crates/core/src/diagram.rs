//! Knot and link diagram shadows.
//!
//! A diagram is given as a list of crossings, each a 4-tuple of edge labels
//! listed counterclockwise around the crossing. Slot `s` of crossing `v` is the
//! dart `4 * v + s`; the strand through a crossing joins slots `s` and `s + 2`.
//! Regions are the orbits of the face permutation: leave along a dart, arrive
//! at the partner dart in slot `j` of the next crossing, and leave again
//! through slot `j - 1`. Walking this way keeps the region on the left, and the
//! corner of crossing `v` between slots `c` and `c + 1` belongs to the region
//! whose orbit contains dart `4 * v + c`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Dart = usize;

#[derive(Debug, Error, PartialEq)]
pub enum DiagramError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("empty diagram: no crossings and no loops")]
    Empty,
    #[error("crossing {crossing} has {arity} entries, expected 4")]
    Arity { crossing: usize, arity: usize },
    #[error("crossing {crossing} uses non-positive edge label {label}")]
    BadLabel { crossing: usize, label: i64 },
    #[error("edge label {label} is used {count} times, expected exactly 2")]
    LabelCount { label: u32, count: usize },
    #[error("loop components together with crossings are not supported")]
    LoopsWithCrossings,
    #[error("diagram is split into {pieces} pieces; only connected diagrams are supported")]
    Disconnected { pieces: usize },
    #[error("rotation system is not planar: traced {regions} regions, expected {expected}")]
    NonPlanar { regions: usize, expected: usize },
    #[error("edge {label} has the same region on both sides")]
    OneSidedEdge { label: u32 },
    #[error("checkerboard shading conflict between regions {0} and {1}")]
    ShadingConflict(usize, usize),
    #[error("unknown region {0}")]
    UnknownRegion(usize),
    #[error("layout lists {found} {what}, diagram has {expected}")]
    LayoutMismatch {
        what: &'static str,
        found: usize,
        expected: usize,
    },
}

impl From<serde_json::Error> for DiagramError {
    fn from(err: serde_json::Error) -> Self {
        DiagramError::Json {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

pub type Point = [f64; 2];

/// Drawing data authored alongside a diagram. Region polygons are indexed by
/// canonical region id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub vertices: Vec<Point>,
    pub edges: Vec<Vec<Point>>,
    pub regions: Vec<Option<Vec<Point>>>,
}

/// The on-disk diagram file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramFile {
    pub name: String,
    pub crossings: Vec<Vec<i64>>,
    #[serde(default)]
    pub loops: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Layout>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: u32,
    /// `None` for a crossing-free loop component.
    pub darts: Option<(Dart, Dart)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Corner {
    pub vertex: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub id: usize,
    /// Outgoing darts of the boundary walk, starting from the smallest.
    pub darts: Vec<Dart>,
    pub corners: Vec<Corner>,
    /// Edge indices along the boundary walk, with multiplicity.
    pub edges: Vec<usize>,
}

impl Region {
    /// Number of corners this region has at `vertex` (0, 1 or 2).
    pub fn corner_multiplicity(&self, vertex: usize) -> usize {
        self.corners.iter().filter(|c| c.vertex == vertex).count()
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.corners.iter().map(|c| c.vertex).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shade {
    Unshaded,
    Shaded,
}

impl Shade {
    pub fn opposite(self) -> Shade {
        match self {
            Shade::Unshaded => Shade::Shaded,
            Shade::Shaded => Shade::Unshaded,
        }
    }
}

impl fmt::Display for Shade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shade::Unshaded => "unshaded",
            Shade::Shaded => "shaded",
        })
    }
}

impl FromStr for Shade {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unshaded" => Ok(Shade::Unshaded),
            "shaded" => Ok(Shade::Shaded),
            other => Err(format!("invalid side {other:?}, expected shaded or unshaded")),
        }
    }
}

/// A checkerboard shading, indexed by region id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Shading(pub Vec<Shade>);

impl Shading {
    pub fn shade(&self, region: usize) -> Shade {
        self.0[region]
    }

    pub fn complement(&self) -> Shading {
        Shading(self.0.iter().map(|s| s.opposite()).collect())
    }

    pub fn regions_with(&self, shade: Shade) -> Vec<usize> {
        (0..self.0.len()).filter(|&r| self.0[r] == shade).collect()
    }
}

/// The dual graph: one node per region, one link per pair of regions sharing an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    pub links: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl DualGraph {
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, region: usize) -> &[usize] {
        &self.adjacency[region]
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.links.contains(&(a.min(b), a.max(b)))
    }

    /// Breadth-first distances from `source`; `None` for unreachable nodes.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adjacency.len()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(r) = queue.pop_front() {
            let d = dist[r].unwrap();
            for &s in &self.adjacency[r] {
                if dist[s].is_none() {
                    dist[s] = Some(d + 1);
                    queue.push_back(s);
                }
            }
        }
        dist
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReducibleVertex {
    pub vertex: usize,
    /// The region touching the vertex from two sides.
    pub two_side_region: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramShadow {
    name: String,
    labels: Vec<[u32; 4]>,
    loops: usize,
    edges: Vec<Edge>,
    partner: Vec<Dart>,
    dart_edge: Vec<usize>,
    dart_region: Vec<usize>,
    regions: Vec<Region>,
    component_count: usize,
    layout: Option<Layout>,
}

pub fn vertex_of(dart: Dart) -> usize {
    dart / 4
}

pub fn slot_of(dart: Dart) -> usize {
    dart % 4
}

/// Next dart leaving the crossing after arriving through `incoming`, keeping
/// the current region on the left.
pub fn face_successor(incoming: Dart) -> Dart {
    4 * vertex_of(incoming) + (slot_of(incoming) + 3) % 4
}

/// The dart on the far side of the crossing along the same strand.
pub fn straight_through(dart: Dart) -> Dart {
    4 * vertex_of(dart) + (slot_of(dart) + 2) % 4
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

pub fn parse_diagram(text: &str) -> Result<DiagramShadow, DiagramError> {
    let file: DiagramFile = serde_json::from_str(text)?;
    DiagramShadow::from_file(file)
}

impl DiagramShadow {
    pub fn from_file(file: DiagramFile) -> Result<Self, DiagramError> {
        let mut labels = Vec::with_capacity(file.crossings.len());
        for (i, tuple) in file.crossings.iter().enumerate() {
            if tuple.len() != 4 {
                return Err(DiagramError::Arity {
                    crossing: i,
                    arity: tuple.len(),
                });
            }
            let mut slots = [0u32; 4];
            for (slot, &label) in tuple.iter().enumerate() {
                if label <= 0 || label > u32::MAX as i64 {
                    return Err(DiagramError::BadLabel { crossing: i, label });
                }
                slots[slot] = label as u32;
            }
            labels.push(slots);
        }
        let mut shadow = Self::from_crossings(&file.name, labels, file.loops)?;
        if let Some(layout) = file.layout {
            shadow.set_layout(layout)?;
        }
        Ok(shadow)
    }

    pub fn from_crossings(name: &str, labels: Vec<[u32; 4]>, loops: usize) -> Result<Self, DiagramError> {
        let n = labels.len();
        if n == 0 && loops == 0 {
            return Err(DiagramError::Empty);
        }
        if n > 0 && loops > 0 {
            return Err(DiagramError::LoopsWithCrossings);
        }
        if n == 0 {
            return Ok(Self::loops_only(name, loops));
        }

        let mut uses: BTreeMap<u32, Vec<Dart>> = BTreeMap::new();
        for (v, tuple) in labels.iter().enumerate() {
            for (slot, &label) in tuple.iter().enumerate() {
                uses.entry(label).or_default().push(4 * v + slot);
            }
        }
        let mut partner = vec![usize::MAX; 4 * n];
        let mut dart_edge = vec![usize::MAX; 4 * n];
        let mut pairs = Vec::with_capacity(uses.len());
        for (&label, darts) in &uses {
            if darts.len() != 2 {
                return Err(DiagramError::LabelCount {
                    label,
                    count: darts.len(),
                });
            }
            pairs.push((darts[0], darts[1], label));
        }
        // canonical edge order: by smallest dart
        pairs.sort();
        let mut edges = Vec::with_capacity(pairs.len());
        for (e, &(a, b, label)) in pairs.iter().enumerate() {
            partner[a] = b;
            partner[b] = a;
            dart_edge[a] = e;
            dart_edge[b] = e;
            edges.push(Edge {
                label,
                darts: Some((a, b)),
            });
        }

        let mut vparent: Vec<usize> = (0..n).collect();
        for e in &edges {
            let (a, b) = e.darts.unwrap();
            union(&mut vparent, vertex_of(a), vertex_of(b));
        }
        let pieces = (0..n).filter(|&v| find(&mut vparent, v) == v).count();
        if pieces != 1 {
            return Err(DiagramError::Disconnected { pieces });
        }

        let mut dparent: Vec<usize> = (0..4 * n).collect();
        for d in 0..4 * n {
            union(&mut dparent, d, partner[d]);
            union(&mut dparent, d, straight_through(d));
        }
        let component_count = (0..4 * n).filter(|&d| find(&mut dparent, d) == d).count();

        // Darts are scanned in increasing order, so orbits come out sorted by
        // their smallest dart.
        let mut dart_region = vec![usize::MAX; 4 * n];
        let mut regions = Vec::new();
        for start in 0..4 * n {
            if dart_region[start] != usize::MAX {
                continue;
            }
            let id = regions.len();
            let mut region = Region {
                id,
                darts: Vec::new(),
                corners: Vec::new(),
                edges: Vec::new(),
            };
            let mut d = start;
            loop {
                dart_region[d] = id;
                region.darts.push(d);
                region.corners.push(Corner {
                    vertex: vertex_of(d),
                    slot: slot_of(d),
                });
                region.edges.push(dart_edge[d]);
                d = face_successor(partner[d]);
                if d == start {
                    break;
                }
            }
            regions.push(region);
        }

        if regions.len() != n + 2 {
            return Err(DiagramError::NonPlanar {
                regions: regions.len(),
                expected: n + 2,
            });
        }
        for e in &edges {
            let (a, b) = e.darts.unwrap();
            if dart_region[a] == dart_region[b] {
                return Err(DiagramError::OneSidedEdge { label: e.label });
            }
        }

        Ok(DiagramShadow {
            name: name.to_string(),
            labels,
            loops: 0,
            edges,
            partner,
            dart_edge,
            dart_region,
            regions,
            component_count,
            layout: None,
        })
    }

    /// `loops` disjoint, unnested circles: one outside region plus one disk per loop.
    fn loops_only(name: &str, loops: usize) -> Self {
        let edges = (0..loops)
            .map(|i| Edge {
                label: i as u32 + 1,
                darts: None,
            })
            .collect();
        let mut regions = vec![Region {
            id: 0,
            darts: Vec::new(),
            corners: Vec::new(),
            edges: (0..loops).collect(),
        }];
        regions.extend((0..loops).map(|i| Region {
            id: i + 1,
            darts: Vec::new(),
            corners: Vec::new(),
            edges: vec![i],
        }));
        DiagramShadow {
            name: name.to_string(),
            labels: Vec::new(),
            loops,
            edges,
            partner: Vec::new(),
            dart_edge: Vec::new(),
            dart_region: Vec::new(),
            regions,
            component_count: loops,
            layout: None,
        }
    }

    pub fn set_layout(&mut self, layout: Layout) -> Result<(), DiagramError> {
        let checks = [
            ("vertices", layout.vertices.len(), self.vertex_count()),
            ("edge polylines", layout.edges.len(), self.edges.len()),
            ("region polygons", layout.regions.len(), self.region_count()),
        ];
        for (what, found, expected) in checks {
            if found != expected {
                return Err(DiagramError::LayoutMismatch { what, found, expected });
            }
        }
        self.layout = Some(layout);
        Ok(())
    }

    pub fn to_file(&self) -> DiagramFile {
        DiagramFile {
            name: self.name.clone(),
            crossings: self
                .labels
                .iter()
                .map(|t| t.iter().map(|&l| l as i64).collect())
                .collect(),
            loops: self.loops,
            layout: self.layout.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("diagram file serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn crossings(&self) -> &[[u32; 4]] {
        &self.labels
    }

    pub fn layout(&self) -> Option<&Layout> {
        self.layout.as_ref()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn loop_count(&self) -> usize {
        self.loops
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn is_knot(&self) -> bool {
        self.component_count == 1
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, id: usize) -> Result<&Region, DiagramError> {
        self.regions.get(id).ok_or(DiagramError::UnknownRegion(id))
    }

    pub fn partner(&self, dart: Dart) -> Dart {
        self.partner[dart]
    }

    pub fn dart_edge(&self, dart: Dart) -> usize {
        self.dart_edge[dart]
    }

    /// Region owning the corner between slot `c` and `c + 1` at the dart's crossing.
    pub fn dart_region(&self, dart: Dart) -> usize {
        self.dart_region[dart]
    }

    /// Regions at the four corners of `vertex`, by slot.
    pub fn corner_regions(&self, vertex: usize) -> [usize; 4] {
        std::array::from_fn(|c| self.dart_region[4 * vertex + c])
    }

    /// Distinct regions incident to `vertex`, ascending.
    pub fn incident_regions(&self, vertex: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self.corner_regions(vertex).into_iter().collect();
        set.into_iter().collect()
    }

    /// The two regions on either side of edge `e`. For a loop edge in a
    /// loops-only diagram these are the outside region and the loop's disk.
    pub fn edge_sides(&self, e: usize) -> (usize, usize) {
        match self.edges[e].darts {
            Some((a, b)) => (self.dart_region[a], self.dart_region[b]),
            None => (0, e + 1),
        }
    }

    /// Edge attached at slot `slot` of `vertex`.
    pub fn slot_edge(&self, vertex: usize, slot: usize) -> usize {
        self.dart_edge[4 * vertex + slot]
    }

    pub fn dual_graph(&self) -> DualGraph {
        let mut links = BTreeSet::new();
        for e in 0..self.edges.len() {
            let (a, b) = self.edge_sides(e);
            if a != b {
                links.insert((a.min(b), a.max(b)));
            }
        }
        let mut adjacency = vec![Vec::new(); self.regions.len()];
        for &(a, b) in &links {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        DualGraph { links, adjacency }
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        a != b
            && (0..self.edges.len()).any(|e| {
                let (x, y) = self.edge_sides(e);
                (x, y) == (a, b) || (x, y) == (b, a)
            })
    }

    /// Lexicographically smallest pair of adjacent regions.
    pub fn canonical_adjacent_pair(&self) -> (usize, usize) {
        *self
            .dual_graph()
            .links
            .iter()
            .next()
            .expect("a diagram always has at least one edge")
    }

    pub fn reducible_vertices(&self) -> Vec<ReducibleVertex> {
        (0..self.vertex_count())
            .filter_map(|v| {
                let corners = self.corner_regions(v);
                corners
                    .iter()
                    .find(|&&r| corners.iter().filter(|&&s| s == r).count() == 2)
                    .map(|&r| ReducibleVertex {
                        vertex: v,
                        two_side_region: r,
                    })
            })
            .collect()
    }

    pub fn is_reducible(&self, vertex: usize) -> bool {
        self.incident_regions(vertex).len() < 4
    }

    pub fn is_reduced(&self) -> bool {
        self.reducible_vertices().is_empty()
    }

    pub fn trace_regions(&self) -> &[Region] {
        &self.regions
    }

    /// Breadth-first 2-coloring of the dual graph with region 0 unshaded.
    pub fn checkerboard_shading(&self) -> Result<Shading, DiagramError> {
        let dual = self.dual_graph();
        let mut shade: Vec<Option<Shade>> = vec![None; self.regions.len()];
        for root in 0..self.regions.len() {
            if shade[root].is_some() {
                continue;
            }
            shade[root] = Some(Shade::Unshaded);
            let mut queue = VecDeque::from([root]);
            while let Some(r) = queue.pop_front() {
                let s = shade[r].unwrap();
                for &t in dual.neighbors(r) {
                    match shade[t] {
                        None => {
                            shade[t] = Some(s.opposite());
                            queue.push_back(t);
                        }
                        Some(ts) if ts == s => return Err(DiagramError::ShadingConflict(r, t)),
                        Some(_) => {}
                    }
                }
            }
        }
        Ok(Shading(shade.into_iter().map(Option::unwrap).collect()))
    }

    /// Number of edges whose two sides carry the same shade.
    pub fn shading_violations(&self, shading: &Shading) -> usize {
        (0..self.edges.len())
            .filter(|&e| {
                let (a, b) = self.edge_sides(e);
                shading.shade(a) == shading.shade(b)
            })
            .count()
    }

    pub fn dual_distance(&self, r1: usize, r2: usize) -> Result<usize, DiagramError> {
        self.region(r1)?;
        self.region(r2)?;
        self.dual_graph().distances_from(r1)[r2].ok_or(DiagramError::UnknownRegion(r2))
    }

    /// All-pairs dual distances.
    pub fn dual_distances(&self) -> Vec<Vec<usize>> {
        let dual = self.dual_graph();
        (0..self.region_count())
            .map(|r| {
                dual.distances_from(r)
                    .into_iter()
                    .map(|d| d.unwrap_or(usize::MAX))
                    .collect()
            })
            .collect()
    }
}
