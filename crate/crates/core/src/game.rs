//! Game matrices and the solvers built on them.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{self, AlgebraError, ExactMatrix, Modulus};
use crate::diagram::{DiagramShadow, Shade, Shading};
use crate::structure::{Sign, SignAssignment};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("diagram has {0} components; the solvers need a knot diagram")]
    NotAKnot(usize),
    #[error("regions {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("unknown region {0}")]
    UnknownRegion(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("{what} has length {found}, expected {expected}")]
    Length {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid increment at vertex {vertex}, region {region}: {reason}")]
    Increment {
        vertex: usize,
        region: usize,
        reason: String,
    },
    #[error("the kernel over the integers is infinite")]
    InfiniteKernel,
    #[error("signing does not yield a null pattern of this game matrix")]
    SigningInvalid,
}

mod int_vec {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Int(i64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(values: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            match v.to_i64() {
                Some(x) => seq.serialize_element(&x)?,
                None => seq.serialize_element(&v.to_string())?,
            }
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Entry>::deserialize(d)?
            .into_iter()
            .map(|e| match e {
                Entry::Int(x) => Ok(BigInt::from(x)),
                Entry::Str(s) => s.parse().map_err(serde::de::Error::custom),
            })
            .collect()
    }
}

macro_rules! int_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(#[serde(with = "int_vec")] pub Vec<BigInt>);

        impl $name {
            pub fn zeros(len: usize) -> Self {
                $name(vec![BigInt::zero(); len])
            }

            pub fn from_i64s(xs: &[i64]) -> Self {
                $name(xs.iter().map(|&x| BigInt::from(x)).collect())
            }

            pub fn from_u64s(xs: &[u64]) -> Self {
                $name(algebra::to_bigints(xs))
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(Zero::is_zero)
            }

            pub fn reduced(&self, k: Modulus) -> Self {
                $name(k.reduce_all(&self.0))
            }
        }

        impl std::ops::Index<usize> for $name {
            type Output = BigInt;

            fn index(&self, i: usize) -> &BigInt {
                &self.0[i]
            }
        }
    };
}

int_vector!(
    /// Vertex colors in canonical vertex order.
    Coloring
);
int_vector!(
    /// Push counts per region in canonical region order.
    PushPattern
);

/// Modulus plus increment-number overrides; unlisted incident pairs use 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameConfig {
    pub modulus: Modulus,
    increments: BTreeMap<(usize, usize), BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncrementOverride {
    pub vertex: usize,
    pub region: usize,
    pub value: i64,
}

impl GameConfig {
    pub fn new(modulus: Modulus) -> Self {
        GameConfig {
            modulus,
            increments: BTreeMap::new(),
        }
    }

    pub fn with_increment(mut self, vertex: usize, region: usize, value: impl Into<BigInt>) -> Self {
        self.increments.insert((vertex, region), value.into());
        self
    }

    /// Sets the same increment for every region incident to `vertex`.
    pub fn with_vertex_increment(mut self, shadow: &DiagramShadow, vertex: usize, value: impl Into<BigInt>) -> Self {
        let value = value.into();
        for r in shadow.incident_regions(vertex) {
            self.increments.insert((vertex, r), value.clone());
        }
        self
    }

    pub fn with_overrides(mut self, overrides: &[IncrementOverride]) -> Self {
        for o in overrides {
            self.increments.insert((o.vertex, o.region), BigInt::from(o.value));
        }
        self
    }

    pub fn overrides(&self) -> Vec<IncrementOverride> {
        self.increments
            .iter()
            .map(|(&(vertex, region), value)| IncrementOverride {
                vertex,
                region,
                value: value.to_i64().unwrap_or(i64::MAX),
            })
            .collect()
    }

    pub fn increment(&self, vertex: usize, region: usize) -> BigInt {
        self.increments.get(&(vertex, region)).cloned().unwrap_or_else(BigInt::one)
    }

    /// Checks the increment rules against the diagram's reducible structure.
    pub fn validate(&self, shadow: &DiagramShadow) -> Result<(), GameError> {
        let fail = |vertex, region, reason: String| Err(GameError::Increment { vertex, region, reason });
        for &(v, r) in self.increments.keys() {
            if v >= shadow.vertex_count() {
                return Err(GameError::UnknownVertex(v));
            }
            if !shadow.incident_regions(v).contains(&r) {
                return fail(v, r, "region is not incident to the vertex".into());
            }
        }
        let reducible: BTreeMap<usize, usize> = shadow
            .reducible_vertices()
            .into_iter()
            .map(|rv| (rv.vertex, rv.two_side_region))
            .collect();
        for v in 0..shadow.vertex_count() {
            let regions = shadow.incident_regions(v);
            let two_side = reducible.get(&v).copied();
            match self.modulus {
                Modulus::Finite(_) => {
                    if two_side.is_none() {
                        let a = self.modulus.reduce(&self.increment(v, regions[0]));
                        if let Some(&r) = regions.iter().find(|&&r| self.modulus.reduce(&self.increment(v, r)) != a) {
                            return fail(v, r, "an irreducible vertex needs one increment for all four regions".into());
                        }
                    }
                    for &r in &regions {
                        if Some(r) == two_side {
                            continue;
                        }
                        if !algebra::is_unit(&self.increment(v, r), self.modulus)? {
                            return fail(v, r, format!("increment {} is a zero divisor mod {}", self.increment(v, r), self.modulus));
                        }
                    }
                }
                Modulus::Infinite => {
                    for &r in &regions {
                        if Some(r) != two_side && !self.increment(v, r).is_one() {
                            return fail(v, r, "with k = inf only the two-side region of a reducible vertex may differ from 1".into());
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// How many colorings can be solved without pushing a given region set `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolvableCount {
    /// `|S|`
    pub i: usize,
    /// null patterns vanishing on `S`
    pub j: u64,
    #[serde(serialize_with = "serialize_count")]
    pub q: BigUint,
}

fn serialize_count<S: Serializer>(q: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match q.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&q.to_string()),
    }
}

#[derive(Debug, Clone)]
pub struct GameMatrix {
    shadow: Arc<DiagramShadow>,
    config: GameConfig,
    matrix: ExactMatrix,
}

pub fn build_game_matrix(shadow: Arc<DiagramShadow>, config: GameConfig) -> Result<GameMatrix, GameError> {
    config.validate(&shadow)?;
    let (n, m) = (shadow.vertex_count(), shadow.region_count());
    let mut matrix = ExactMatrix::zeros(n, m);
    for v in 0..n {
        for r in shadow.incident_regions(v) {
            matrix.set(v, r, config.modulus.reduce(&config.increment(v, r)));
        }
    }
    Ok(GameMatrix { shadow, config, matrix })
}

impl GameMatrix {
    pub fn shadow(&self) -> &Arc<DiagramShadow> {
        &self.shadow
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn modulus(&self) -> Modulus {
        self.config.modulus
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn vertex_count(&self) -> usize {
        self.matrix.rows()
    }

    pub fn region_count(&self) -> usize {
        self.matrix.cols()
    }

    pub fn pinned_pair(&self) -> (usize, usize) {
        self.shadow.canonical_adjacent_pair()
    }

    fn check_len(&self, what: &'static str, found: usize, expected: usize) -> Result<(), GameError> {
        if found != expected {
            return Err(GameError::Length { what, expected, found });
        }
        Ok(())
    }

    fn check_region(&self, r: usize) -> Result<(), GameError> {
        if r >= self.region_count() {
            return Err(GameError::UnknownRegion(r));
        }
        Ok(())
    }

    fn require_knot(&self) -> Result<(), GameError> {
        if !self.shadow.is_knot() {
            return Err(GameError::NotAKnot(self.shadow.component_count()));
        }
        Ok(())
    }

    /// `M p`, reduced for finite `k`.
    pub fn image(&self, p: &PushPattern) -> Result<Coloring, GameError> {
        self.check_len("push pattern", p.len(), self.region_count())?;
        Ok(Coloring(self.modulus().reduce_all(&self.matrix.mul_vec(&p.0)?)))
    }

    /// `c + M p`.
    pub fn apply_pattern(&self, c: &Coloring, p: &PushPattern) -> Result<Coloring, GameError> {
        self.check_len("coloring", c.len(), self.vertex_count())?;
        let image = self.image(p)?;
        Ok(Coloring(
            c.0.iter()
                .zip(&image.0)
                .map(|(a, b)| self.modulus().reduce(&(a + b)))
                .collect(),
        ))
    }

    pub fn is_null_pattern(&self, p: &PushPattern) -> Result<bool, GameError> {
        Ok(self.image(p)?.is_zero())
    }

    /// The unique `p` with `M p = -c` and `p(ra) = p(rb) = 0`.
    pub fn solve_pinned(&self, c: &Coloring, ra: usize, rb: usize) -> Result<PushPattern, GameError> {
        self.require_knot()?;
        self.check_len("coloring", c.len(), self.vertex_count())?;
        self.check_region(ra)?;
        self.check_region(rb)?;
        if !self.shadow.are_adjacent(ra, rb) {
            return Err(GameError::NotAdjacent(ra, rb));
        }
        let free: Vec<usize> = (0..self.region_count()).filter(|&r| r != ra && r != rb).collect();
        let square = self.matrix.select_columns(&free);
        let rhs: Vec<BigInt> = c.0.iter().map(|x| -x).collect();
        let x = match self.modulus() {
            k @ Modulus::Finite(_) => algebra::solve_unit_square(&square, &k.reduce_all(&rhs), k)?,
            Modulus::Infinite => algebra::solve_integer_square(&square, &rhs)?,
        };
        let mut p = PushPattern::zeros(self.region_count());
        for (&r, value) in free.iter().zip(x) {
            p.0[r] = value;
        }
        Ok(p)
    }

    /// Solution pinned at the canonical adjacent pair.
    pub fn solve(&self, c: &Coloring) -> Result<PushPattern, GameError> {
        let (ra, rb) = self.pinned_pair();
        self.solve_pinned(c, ra, rb)
    }

    /// The unique solving pattern with `p(ra) = a` and `p(rb) = b`.
    pub fn solve_prescribed(
        &self,
        c: &Coloring,
        (ra, a): (usize, BigInt),
        (rb, b): (usize, BigInt),
    ) -> Result<PushPattern, GameError> {
        self.check_region(ra)?;
        self.check_region(rb)?;
        let k = self.modulus();
        let mut seed = PushPattern::zeros(self.region_count());
        seed.0[ra] = k.reduce(&a);
        seed.0[rb] = k.reduce(&b);
        let shifted = self.apply_pattern(c, &seed)?;
        let mut p = self.solve_pinned(&shifted, ra, rb)?;
        p.0[ra] = seed.0[ra].clone();
        p.0[rb] = seed.0[rb].clone();
        Ok(p)
    }

    /// All `k^2` null patterns, one per value pair on the canonical adjacent
    /// pair, sorted.
    pub fn enumerate_null_patterns(&self) -> Result<Vec<PushPattern>, GameError> {
        let k = self.modulus().value().ok_or(GameError::InfiniteKernel)?;
        self.require_knot()?;
        let (ra, rb) = self.pinned_pair();
        let zero = Coloring::zeros(self.vertex_count());
        let mut out = Vec::with_capacity((k * k) as usize);
        for a in 0..k {
            for b in 0..k {
                out.push(self.solve_prescribed(&zero, (ra, a.into()), (rb, b.into()))?);
            }
        }
        out.sort();
        Ok(out)
    }

    /// The family `l_{a,b}`: `a` on shaded regions, `b` on `+` unshaded regions
    /// and `-b - 2a` on `-` unshaded regions.
    pub fn nullpattern_family_ab(
        &self,
        shading: &Shading,
        signing: &SignAssignment,
        a: &BigInt,
        b: &BigInt,
    ) -> Result<PushPattern, GameError> {
        if signing.side != Shade::Unshaded || shading.0.len() != self.region_count() {
            return Err(GameError::SigningInvalid);
        }
        let k = self.modulus();
        let mut p = PushPattern::zeros(self.region_count());
        for r in 0..self.region_count() {
            let value = match shading.shade(r) {
                Shade::Shaded => a.clone(),
                Shade::Unshaded => match signing.signs.get(&r) {
                    Some(Sign::Plus) => b.clone(),
                    Some(Sign::Minus) => -b - 2 * a,
                    None => return Err(GameError::SigningInvalid),
                },
            };
            p.0[r] = k.reduce(&value);
        }
        if !self.is_null_pattern(&p)? {
            return Err(GameError::SigningInvalid);
        }
        Ok(p)
    }

    /// Number of null patterns vanishing on `regions`, and the resulting count
    /// `q = k^(m - i) / j` of colorings solvable without pushing them.
    pub fn count_solvable_without(&self, regions: &BTreeSet<usize>) -> Result<SolvableCount, GameError> {
        let kernel = self.enumerate_null_patterns()?;
        self.count_from_kernel(&kernel, regions)
    }

    /// Same as [`count_solvable_without`](Self::count_solvable_without) with a
    /// precomputed kernel.
    pub fn count_from_kernel(&self, kernel: &[PushPattern], regions: &BTreeSet<usize>) -> Result<SolvableCount, GameError> {
        let k = self.modulus().require_finite()?;
        for &r in regions {
            self.check_region(r)?;
        }
        let j = kernel
            .iter()
            .filter(|p| regions.iter().all(|&r| p[r].is_zero()))
            .count() as u64;
        let i = regions.len();
        let total = BigUint::from(k).pow((self.region_count() - i) as u32);
        let (q, rem) = total.div_rem(&BigUint::from(j));
        assert!(rem.is_zero(), "k^(m-i) / j must be exact (k^(m-i) = {total}, j = {j})");
        Ok(SolvableCount { i, j, q })
    }

    /// `p(r1) + p(r2)` over the two sides of edge `e`.
    pub fn edge_push_number(&self, p: &PushPattern, e: usize) -> Result<BigInt, GameError> {
        self.check_len("push pattern", p.len(), self.region_count())?;
        if e >= self.shadow.edges().len() {
            return Err(GameError::UnknownEdge(e));
        }
        let (r1, r2) = self.shadow.edge_sides(e);
        Ok(self.modulus().reduce(&(&p[r1] + &p[r2])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;
    use crate::structure::alternating_signing;

    const TREFOIL: &str = r#"{"name":"trefoil","crossings":[[1,5,2,4],[3,1,4,6],[5,3,6,2]]}"#;
    const FIGURE_EIGHT: &str = r#"{"name":"4_1","crossings":[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]}"#;
    const CURL: &str = r#"{"name":"curl","crossings":[[1,1,2,2]]}"#;

    fn shadow(text: &str) -> Arc<DiagramShadow> {
        Arc::new(parse_diagram(text).unwrap())
    }

    fn game(text: &str, k: Modulus) -> GameMatrix {
        build_game_matrix(shadow(text), GameConfig::new(k)).unwrap()
    }

    /// All patterns `p` with `M p = -c`, by enumeration.
    fn brute_solutions(gm: &GameMatrix, c: &Coloring) -> Vec<PushPattern> {
        let k = gm.modulus().value().unwrap();
        let m = gm.region_count();
        let mut out = Vec::new();
        for code in 0..k.pow(m as u32) {
            let p: Vec<u64> = (0..m).map(|i| (code / k.pow(i as u32)) % k).collect();
            let p = PushPattern::from_u64s(&p);
            if gm.apply_pattern(c, &p).unwrap().is_zero() {
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn trefoil_matrix_is_incidence() {
        let gm = game(TREFOIL, Modulus::Finite(2));
        assert_eq!((gm.matrix().rows(), gm.matrix().cols()), (3, 5));
        for v in 0..3 {
            let ones = gm.matrix().row(v).iter().filter(|x| x.is_one()).count();
            assert_eq!(ones, 4);
        }
    }

    #[test]
    fn reducible_row_with_custom_increments() {
        let s = shadow(CURL);
        let red = s.reducible_vertices()[0];
        let config = GameConfig::new(Modulus::Finite(4)).with_increment(0, red.two_side_region, 2);
        let gm = build_game_matrix(s.clone(), config).unwrap();
        let mut row: Vec<i64> = gm.matrix().row(0).iter().map(|x| x.to_i64().unwrap()).collect();
        row.sort_unstable();
        assert_eq!(row, vec![1, 1, 2]);

        let zero_div = GameConfig::new(Modulus::Finite(4))
            .with_increment(0, (red.two_side_region + 1) % 3, 2);
        assert!(matches!(build_game_matrix(s.clone(), zero_div), Err(GameError::Increment { .. })));

        let double = GameConfig::new(Modulus::Infinite).with_increment(0, red.two_side_region, 2);
        assert!(build_game_matrix(s.clone(), double).is_ok());
        let bad = GameConfig::new(Modulus::Infinite).with_increment(0, (red.two_side_region + 1) % 3, 2);
        assert!(build_game_matrix(s, bad).is_err());
    }

    #[test]
    fn irreducible_increments_must_agree() {
        let s = shadow(TREFOIL);
        let uneven = GameConfig::new(Modulus::Finite(5)).with_increment(0, s.incident_regions(0)[0], 2);
        assert!(build_game_matrix(s.clone(), uneven).is_err());
        let even = GameConfig::new(Modulus::Finite(5)).with_vertex_increment(&s, 0, 2);
        assert!(build_game_matrix(s, even).is_ok());
    }

    #[test]
    fn apply_pattern_properties() {
        let gm = game(TREFOIL, Modulus::Finite(3));
        let c = Coloring::from_i64s(&[1, 2, 0]);
        assert_eq!(gm.apply_pattern(&c, &PushPattern::zeros(5)).unwrap(), c);
        let mut kp = PushPattern::zeros(5);
        kp.0[2] = BigInt::from(3);
        assert_eq!(gm.apply_pattern(&c, &kp).unwrap(), c);
        let p = PushPattern::from_i64s(&[1, 0, 2, 0, 1]);
        let q = PushPattern::from_i64s(&[0, 1, 1, 2, 0]);
        let pq = gm.apply_pattern(&gm.apply_pattern(&c, &p).unwrap(), &q).unwrap();
        let qp = gm.apply_pattern(&gm.apply_pattern(&c, &q).unwrap(), &p).unwrap();
        assert_eq!(pq, qp);
        assert!(matches!(
            gm.apply_pattern(&Coloring::zeros(2), &p),
            Err(GameError::Length { .. })
        ));
    }

    #[test]
    fn pinned_solution_matches_brute_force() {
        let gm = game(TREFOIL, Modulus::Finite(3));
        let c = Coloring::from_i64s(&[1, 1, 1]);
        let dual = gm.shadow().dual_graph();
        for &(ra, rb) in &dual.links {
            let p = gm.solve_pinned(&c, ra, rb).unwrap();
            let brute: Vec<_> = brute_solutions(&gm, &c)
                .into_iter()
                .filter(|q| q[ra].is_zero() && q[rb].is_zero())
                .collect();
            assert_eq!(brute, vec![p]);
        }
        let zero = gm.solve(&Coloring::zeros(3)).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn pinned_round_trip() {
        let gm = game(FIGURE_EIGHT, Modulus::Finite(5));
        let (ra, rb) = gm.pinned_pair();
        let mut p0 = PushPattern::from_i64s(&[3, 1, 4, 1, 0, 2]);
        p0.0[ra] = BigInt::zero();
        p0.0[rb] = BigInt::zero();
        let c = gm.image(&p0).unwrap();
        let c = Coloring(c.0.iter().map(|x| Modulus::Finite(5).reduce(&-x)).collect());
        assert_eq!(gm.solve_pinned(&c, ra, rb).unwrap(), p0);
    }

    #[test]
    fn pinned_rejects_non_adjacent() {
        let s = shadow(TREFOIL);
        let gm = build_game_matrix(s.clone(), GameConfig::new(Modulus::Finite(3))).unwrap();
        let triangles: Vec<usize> = s.regions().iter().filter(|r| r.edges.len() == 3).map(|r| r.id).collect();
        assert_eq!(
            gm.solve_pinned(&Coloring::zeros(3), triangles[0], triangles[1]),
            Err(GameError::NotAdjacent(triangles[0], triangles[1]))
        );
    }

    #[test]
    fn infinite_modulus_solves_exactly() {
        let gm = game(TREFOIL, Modulus::Infinite);
        let c = Coloring::from_i64s(&[1, 1, 1]);
        let p = gm.solve(&c).unwrap();
        let back = gm.apply_pattern(&c, &p).unwrap();
        assert!(back.is_zero());
        assert!(matches!(gm.enumerate_null_patterns(), Err(GameError::InfiniteKernel)));
    }

    #[test]
    fn prescribed_matches_brute_force() {
        let gm = game(FIGURE_EIGHT, Modulus::Finite(2));
        let c = Coloring::from_i64s(&[1, 1, 1, 1]);
        let (ra, rb) = gm.pinned_pair();
        let p = gm.solve_prescribed(&c, (ra, 1.into()), (rb, 0.into())).unwrap();
        let brute: Vec<_> = brute_solutions(&gm, &c)
            .into_iter()
            .filter(|q| q[ra].is_one() && q[rb].is_zero())
            .collect();
        assert_eq!(brute, vec![p.clone()]);
        assert_eq!(
            gm.solve_prescribed(&c, (ra, 0.into()), (rb, 0.into())).unwrap(),
            gm.solve_pinned(&c, ra, rb).unwrap()
        );
        assert_eq!(brute_solutions(&gm, &c).len(), 4);
    }

    #[test]
    fn trefoil_kernel_mod_three() {
        let gm = game(TREFOIL, Modulus::Finite(3));
        let kernel = gm.enumerate_null_patterns().unwrap();
        assert_eq!(kernel.len(), 9);
        let brute = algebra::brute_force_kernel(gm.matrix(), Modulus::Finite(3), algebra::DEFAULT_BUDGET).unwrap();
        let brute: Vec<_> = brute.iter().map(|p| PushPattern::from_u64s(p)).collect();
        assert_eq!(kernel, brute);
    }

    #[test]
    fn reduced_k2_kernel_is_shading_indicators() {
        let s = shadow(FIGURE_EIGHT);
        let gm = build_game_matrix(s.clone(), GameConfig::new(Modulus::Finite(2))).unwrap();
        let shading = s.checkerboard_shading().unwrap();
        let indicator = |f: &dyn Fn(Shade) -> bool| {
            PushPattern((0..6).map(|r| BigInt::from(f(shading.shade(r)) as u8)).collect())
        };
        let mut expected = vec![
            indicator(&|_| false),
            indicator(&|s| s == Shade::Shaded),
            indicator(&|s| s == Shade::Unshaded),
            indicator(&|_| true),
        ];
        expected.sort();
        assert_eq!(gm.enumerate_null_patterns().unwrap(), expected);
    }

    #[test]
    fn counts_without_regions() {
        let s = shadow(FIGURE_EIGHT);
        let gm = build_game_matrix(s.clone(), GameConfig::new(Modulus::Finite(2))).unwrap();
        let (ra, rb) = gm.pinned_pair();
        let count = gm.count_solvable_without(&[ra, rb].into()).unwrap();
        assert_eq!((count.j, count.q.clone()), (1, BigUint::from(16u32)));
        let shading = s.checkerboard_shading().unwrap();
        let shaded = shading.regions_with(Shade::Shaded);
        let count = gm.count_solvable_without(&[shaded[0], shaded[1]].into()).unwrap();
        // 2^(n + 1 - i) with n = 4, i = 2
        assert_eq!((count.j, count.q), (2, BigUint::from(8u32)));
    }

    #[test]
    fn trefoil_family_ab() {
        let s = shadow(TREFOIL);
        let k = Modulus::Finite(3);
        let gm = build_game_matrix(s.clone(), GameConfig::new(k)).unwrap();
        let mut shading = s.checkerboard_shading().unwrap();
        let triangle = s.regions().iter().find(|r| r.edges.len() == 3).unwrap().id;
        if shading.shade(triangle) == Shade::Shaded {
            shading = shading.complement();
        }
        let signing = alternating_signing(&s, &shading, Shade::Unshaded).unwrap();
        let zero = gm.nullpattern_family_ab(&shading, &signing, &0.into(), &0.into()).unwrap();
        assert!(zero.is_zero());
        let l = gm.nullpattern_family_ab(&shading, &signing, &1.into(), &0.into()).unwrap();
        assert!(gm.is_null_pattern(&l).unwrap());
        let mut family = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                family.push(gm.nullpattern_family_ab(&shading, &signing, &a.into(), &b.into()).unwrap());
            }
        }
        family.sort();
        assert_eq!(family, gm.enumerate_null_patterns().unwrap());
    }

    #[test]
    fn edge_push_numbers() {
        let gm = game(TREFOIL, Modulus::Finite(5));
        let zero = PushPattern::zeros(5);
        for e in 0..6 {
            assert!(gm.edge_push_number(&zero, e).unwrap().is_zero());
        }
        for l in gm.enumerate_null_patterns().unwrap() {
            let s = gm.edge_push_number(&l, 0).unwrap();
            let neg = Modulus::Finite(5).reduce(&-&s);
            for e in 0..6 {
                let v = gm.edge_push_number(&l, e).unwrap();
                assert!(v == s || v == neg);
            }
        }
        assert_eq!(gm.edge_push_number(&zero, 6), Err(GameError::UnknownEdge(6)));
    }

    #[test]
    fn solvers_reject_links() {
        // Hopf link: two crossings, two components
        let s = shadow(r#"{"name":"hopf","crossings":[[1,3,2,4],[3,1,4,2]]}"#);
        assert_eq!(s.component_count(), 2);
        let gm = build_game_matrix(s, GameConfig::new(Modulus::Finite(2))).unwrap();
        assert_eq!(gm.solve(&Coloring::zeros(2)), Err(GameError::NotAKnot(2)));
    }
}
