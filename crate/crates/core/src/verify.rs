//! Corpus of small diagrams and exhaustive checks of the game's counting
//! theorems. Every check is an exact comparison of integers or finite sets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{self, ExactMatrix, Modulus, PatternWalk};
use crate::catalog::{BUILTIN_FILES, BUILTIN_MANIFEST};
use crate::diagram::{parse_diagram, DiagramShadow, Shade, Shading};
use crate::game::{build_game_matrix, Coloring, GameConfig, GameMatrix, PushPattern};
use crate::structure::{alternating_signing, connectedly_reducible_parts, even_boundary_check, is_valid_signing, Sign, SignAssignment};

/// Seed for the random integer colorings of the `k = inf` check.
pub const INTEGER_SEED: u64 = 0x5eed;
pub const INTEGER_SAMPLES: usize = 100;
pub const INTEGER_RANGE: (i64, i64) = (-9, 9);

/// Largest region set size in the counting checks.
pub const MAX_UNPUSHED: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub reduced: bool,
    pub has_reducible: bool,
    /// Sides of the canonical shading that admit an alternating signing.
    pub alternating_sides: Vec<Shade>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub n: usize,
    pub m: usize,
    /// Edge counts of the region boundaries, largest first.
    pub region_edge_multiplicities: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub file: String,
    pub flags: Flags,
    pub expected: Expected,
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub file: String,
    pub flags: Flags,
    pub expected: Expected,
    /// A file that fails to parse is kept and reported as a failed row.
    pub shadow: Result<Arc<DiagramShadow>, String>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("corpus manifest lists {0} twice")]
    Duplicate(String),
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    /// The corpus bundled with the crate.
    pub fn builtin() -> Corpus {
        let files: HashMap<&str, &str> = BUILTIN_FILES.iter().copied().collect();
        Corpus::from_manifest(BUILTIN_MANIFEST, |file| {
            files.get(file).map(|t| t.to_string()).ok_or_else(|| format!("{file} is not bundled"))
        })
        .expect("bundled corpus manifest is valid")
    }

    /// Reads `corpus.json` in `dir` and the diagram files it names.
    pub fn load_dir(dir: &Path) -> Result<Corpus, CorpusError> {
        let manifest_path = dir.join(crate::catalog::MANIFEST_FILE);
        let manifest = fs::read_to_string(&manifest_path).map_err(|source| CorpusError::Io {
            path: manifest_path.display().to_string(),
            source,
        })?;
        Corpus::from_manifest(&manifest, |file| fs::read_to_string(dir.join(file)).map_err(|e| format!("cannot read {file}: {e}")))
    }

    pub fn from_manifest(manifest: &str, read: impl Fn(&str) -> Result<String, String>) -> Result<Corpus, CorpusError> {
        let listed: Vec<ManifestEntry> = serde_json::from_str(manifest)?;
        let mut seen = BTreeSet::new();
        let mut entries = Vec::with_capacity(listed.len());
        for e in listed {
            if !seen.insert(e.name.clone()) {
                return Err(CorpusError::Duplicate(e.name));
            }
            let shadow = read(&e.file).and_then(|text| parse_diagram(&text).map(Arc::new).map_err(|err| format!("{}: {err}", e.file)));
            entries.push(CorpusEntry {
                name: e.name,
                file: e.file,
                flags: e.flags,
                expected: e.expected,
                shadow,
            });
        }
        Ok(Corpus { entries })
    }

    pub fn get(&self, name: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// The entries named in `names`, in corpus order.
    pub fn select(&self, names: &[&str]) -> Corpus {
        Corpus {
            entries: self.entries.iter().filter(|e| names.contains(&e.name.as_str())).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// Brute force would exceed the budget.
    Skip,
    /// Recorded without an assertion.
    Info,
}

impl Outcome {
    fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skip => "SKIP",
            Outcome::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub diagram: String,
    pub k: String,
    pub check: String,
    pub status: Outcome,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    /// True iff no row failed.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != Outcome::Fail)
    }

    pub fn count(&self, status: Outcome) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.status == Outcome::Fail)
    }

    pub fn to_text(&self) -> String {
        let width = |f: fn(&Row) -> usize| self.rows.iter().map(f).max().unwrap_or(0);
        let (wd, wk, wc) = (width(|r| r.diagram.len()), width(|r| r.k.len()), width(|r| r.check.len()));
        let mut out = String::new();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}  {:wd$}  {:wk$}  {:wc$}  {}",
                r.status.label(),
                r.diagram,
                r.k,
                r.check,
                r.detail
            );
        }
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} skipped, {} informational",
            self.count(Outcome::Pass),
            self.count(Outcome::Fail),
            self.count(Outcome::Skip),
            self.count(Outcome::Info)
        );
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every applicable check for each entry and modulus, in corpus order,
/// then modulus order, then a fixed check order. `budget` caps the brute-force
/// pattern evaluations of each row.
pub fn run_suite(corpus: &Corpus, k_list: &[Modulus], budget: u64) -> Report {
    let mut rows = Vec::new();
    for entry in &corpus.entries {
        rows.extend(check_structure(entry));
        if entry.shadow.is_err() {
            continue;
        }
        for &k in k_list {
            match k {
                Modulus::Infinite => rows.extend(check_integer(entry)),
                Modulus::Finite(k) => {
                    rows.extend(check_kernel(entry, k, budget));
                    rows.extend(check_solvable(entry, k, budget));
                    rows.extend(check_lemmas(entry, k));
                    if k == 2 {
                        rows.extend(check_thm2(entry, budget));
                    }
                    rows.extend(check_thmp(entry, k, budget));
                    rows.extend(check_thmk(entry, k, budget));
                    rows.extend(check_section6(entry, k));
                }
            }
        }
    }
    Report { rows }
}

struct Rows {
    diagram: String,
    k: String,
    rows: Vec<Row>,
}

impl Rows {
    fn new(entry: &CorpusEntry, k: impl ToString) -> Rows {
        Rows {
            diagram: entry.name.clone(),
            k: k.to_string(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, check: &str, status: Outcome, detail: impl Into<String>) {
        self.rows.push(Row {
            diagram: self.diagram.clone(),
            k: self.k.clone(),
            check: check.to_string(),
            status,
            detail: detail.into(),
        });
    }

    /// Records `Pass`/`Fail` from the result; `Err` carries the failure text.
    fn verdict(&mut self, check: &str, result: Result<String, String>) {
        match result {
            Ok(detail) => self.push(check, Outcome::Pass, detail),
            Err(detail) => self.push(check, Outcome::Fail, detail),
        }
    }
}

/// Running total of brute-force pattern evaluations for one row.
struct Budget {
    left: u64,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Budget { left: limit }
    }

    fn take(&mut self, k: u64, dims: usize) -> bool {
        match power(k, dims) {
            Some(cost) if cost <= self.left => {
                self.left -= cost;
                true
            }
            _ => false,
        }
    }
}

fn power(k: u64, e: usize) -> Option<u64> {
    k.checked_pow(u32::try_from(e).ok()?)
}

fn shadow_of(entry: &CorpusEntry) -> Arc<DiagramShadow> {
    entry.shadow.clone().expect("checked by the caller")
}

fn default_game(shadow: &Arc<DiagramShadow>, k: Modulus) -> Result<GameMatrix, String> {
    build_game_matrix(shadow.clone(), GameConfig::new(k)).map_err(|e| e.to_string())
}

fn residues(p: &PushPattern) -> Vec<u64> {
    p.0.iter().map(|x| x.to_u64().expect("reduced entries are small and nonnegative")).collect()
}

fn kernel_of(gm: &GameMatrix) -> Result<Vec<Vec<u64>>, String> {
    Ok(gm.enumerate_null_patterns().map_err(|e| e.to_string())?.iter().map(residues).collect())
}

/// Number of kernel patterns vanishing on `regions`.
fn vanishing(kernel: &[Vec<u64>], regions: &[usize]) -> u64 {
    kernel.iter().filter(|p| regions.iter().all(|&r| p[r] == 0)).count() as u64
}

/// All subsets of `items` with `1..=max` elements, by size then lexicographically.
fn subsets(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    fn grow(items: &[usize], size: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..items.len() {
            current.push(items[i]);
            grow(items, size, i + 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    for size in 1..=max.min(items.len()) {
        grow(items, size, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Brute-force size of the column space of `M` without the columns in `unpushed`.
fn image_without(gm: &GameMatrix, k: u64, unpushed: &[usize]) -> u64 {
    let keep: Vec<usize> = (0..gm.region_count()).filter(|r| !unpushed.contains(r)).collect();
    algebra::brute_force_image_size(&gm.matrix().select_columns(&keep), Modulus::Finite(k), u64::MAX)
        .expect("caller checked the budget")
}

fn smallest_odd_prime_factor(k: u64) -> Option<u64> {
    let mut k = k;
    while k.is_multiple_of(2) {
        k /= 2;
    }
    (3..=k).step_by(2).find(|p| k.is_multiple_of(*p))
}

fn units(k: u64) -> Vec<u64> {
    (1..k).filter(|u| u.gcd(&k) == 1).collect()
}

/// A non-default version of the game: each irreducible vertex gets its own
/// unit increment, reducible vertices get units on the one-sided regions and
/// `v mod k` (possibly zero) on the two-sided one.
pub fn varied_config(shadow: &DiagramShadow, k: u64) -> GameConfig {
    let units = units(k);
    let reducible: BTreeMap<usize, usize> = shadow.reducible_vertices().iter().map(|r| (r.vertex, r.two_side_region)).collect();
    let mut config = GameConfig::new(Modulus::Finite(k));
    for v in 0..shadow.vertex_count() {
        match reducible.get(&v) {
            None => config = config.with_vertex_increment(shadow, v, units[v % units.len()]),
            Some(&r0) => {
                for (i, r) in shadow.incident_regions(v).into_iter().enumerate() {
                    let value = if r == r0 { v as u64 % k } else { units[(v + i) % units.len()] };
                    config = config.with_increment(v, r, value);
                }
            }
        }
    }
    config
}

/// Recomputed flags and structure against the manifest, and the even-boundary
/// criterion against direct signing search on both sides.
pub fn check_structure(entry: &CorpusEntry) -> Vec<Row> {
    let mut rows = Rows::new(entry, "-");
    let shadow = match &entry.shadow {
        Ok(s) => s,
        Err(e) => {
            rows.push("structure", Outcome::Fail, e.clone());
            return rows.rows;
        }
    };
    let shading = match shadow.checkerboard_shading() {
        Ok(s) => s,
        Err(e) => {
            rows.push("structure", Outcome::Fail, e.to_string());
            return rows.rows;
        }
    };
    let sides = [Shade::Unshaded, Shade::Shaded];
    let flags = Flags {
        reduced: shadow.is_reduced(),
        has_reducible: !shadow.reducible_vertices().is_empty(),
        alternating_sides: sides
            .into_iter()
            .filter(|&side| alternating_signing(shadow, &shading, side).is_some())
            .collect(),
    };
    let mut multiplicities: Vec<usize> = shadow.regions().iter().map(|r| r.edges.len()).collect();
    multiplicities.sort_unstable_by(|a, b| b.cmp(a));
    let found = Expected {
        n: shadow.vertex_count(),
        m: shadow.region_count(),
        region_edge_multiplicities: multiplicities.clone(),
    };

    let mut problems = Vec::new();
    if flags != entry.flags {
        problems.push(format!("flags {:?} recomputed as {:?}", entry.flags, flags));
    }
    if found != entry.expected {
        problems.push(format!("expected {:?}, found {:?}", entry.expected, found));
    }
    let (n, m, edges) = (found.n, found.m, shadow.edges().len());
    if shadow.is_knot() && n > 0 && m != n + 2 {
        problems.push(format!("m = {m} but n + 2 = {}", n + 2));
    }
    if edges != 2 * n + shadow.loop_count() {
        problems.push(format!("{edges} edges for {n} crossings and {} loops", shadow.loop_count()));
    }
    if multiplicities.iter().sum::<usize>() != 2 * edges {
        problems.push("region edge multiplicities do not sum to twice the edge count".into());
    }
    let violations = shadow.shading_violations(&shading);
    if violations > 0 {
        problems.push(format!("{violations} edges violate the shading"));
    }
    let summary = format!(
        "n={n} m={m} {} signable: {}",
        if flags.reduced { "reduced" } else { "non-reduced" },
        if flags.alternating_sides.is_empty() {
            "none".to_string()
        } else {
            flags.alternating_sides.iter().map(Shade::to_string).collect::<Vec<_>>().join(", ")
        }
    );
    rows.verdict("structure", if problems.is_empty() { Ok(summary) } else { Err(problems.join("; ")) });

    let mut mismatches = Vec::new();
    for side in sides {
        let signing = alternating_signing(shadow, &shading, side);
        if signing.is_some() != even_boundary_check(shadow, &shading, side) {
            mismatches.push(format!("{side}: signing search and even-boundary criterion disagree"));
        }
        if let Some(s) = signing {
            if !is_valid_signing(shadow, &shading, &s) {
                mismatches.push(format!("{side}: returned signing is not alternating"));
            }
        }
    }
    rows.verdict(
        "signing",
        if mismatches.is_empty() {
            Ok("signing exists exactly when the opposite side has even boundaries".into())
        } else {
            Err(mismatches.join("; "))
        },
    );
    rows.rows
}

/// `enumerate_null_patterns` has `k^2` distinct null patterns, one per value
/// pair on the pinned regions, and equals the brute-force kernel; the same
/// for a varied version of the game.
pub fn check_kernel(entry: &CorpusEntry, k: u64, budget: u64) -> Vec<Row> {
    let mut rows = Rows::new(entry, k);
    let shadow = shadow_of(entry);
    if !shadow.is_knot() {
        return rows.rows;
    }
    let default = default_game(&shadow, Modulus::Finite(k));
    let varied = build_game_matrix(shadow.clone(), varied_config(&shadow, k)).map_err(|e| e.to_string());
    for (check, game) in [("kernel", default), ("kernel.varied", varied)] {
        let listed = game.and_then(|gm| {
            let kernel = kernel_of(&gm)?;
            let (ra, rb) = gm.pinned_pair();
            let pins: BTreeSet<(u64, u64)> = kernel.iter().map(|p| (p[ra], p[rb])).collect();
            let distinct: BTreeSet<&Vec<u64>> = kernel.iter().collect();
            let all_null = kernel
                .iter()
                .all(|p| gm.is_null_pattern(&PushPattern::from_u64s(p)).unwrap_or(false));
            let square = (k * k) as usize;
            if kernel.len() != square || distinct.len() != square || pins.len() != square || !all_null {
                return Err(format!(
                    "{} patterns, {} distinct, {} pinned value pairs, all null: {all_null}",
                    kernel.len(),
                    distinct.len(),
                    pins.len()
                ));
            }
            if gm.region_count() != gm.vertex_count() + 2 {
                return Err(format!("k^(m-n) = {k}^{} differs from k^2", gm.region_count() - gm.vertex_count()));
            }
            Ok((gm, kernel))
        });
        let (gm, kernel) = match listed {
            Ok(x) => x,
            Err(e) => {
                rows.push(check, Outcome::Fail, e);
                continue;
            }
        };
        let m = gm.region_count();
        if !Budget::new(budget).take(k, m) {
            rows.push(check, Outcome::Skip, format!("{} null patterns; brute force over {k}^{m} exceeds the budget", kernel.len()));
            continue;
        }
        let brute = algebra::brute_force_kernel(gm.matrix(), Modulus::Finite(k), budget).expect("within budget");
        rows.verdict(
            check,
            if brute == kernel {
                Ok(format!("{} null patterns, equal to brute force over {k}^{m}", kernel.len()))
            } else {
                Err(format!("enumerated {} patterns, brute force found {}", kernel.len(), brute.len()))
            },
        );
    }
    rows.rows
}

/// Every one of the `k^n` colorings is solved by the pinned solver, and brute
/// force over the `k^n` pinned patterns confirms the solution is unique.
pub fn check_solvable(entry: &CorpusEntry, k: u64, budget: u64) -> Vec<Row> {
    let mut rows = Rows::new(entry, k);
    let shadow = shadow_of(entry);
    if !shadow.is_knot() {
        return rows.rows;
    }
    let n = shadow.vertex_count();
    // each coloring costs one solve plus one brute-force pattern
    if power(k, n).is_none_or(|c| c.saturating_mul(2) > budget) {
        rows.push("solvable", Outcome::Skip, format!("{k}^{n} colorings exceed the budget"));
        return rows.rows;
    }
    let result = default_game(&shadow, Modulus::Finite(k)).and_then(|gm| exhaustive_pinned_solve(&gm, k));
    rows.verdict("solvable", result);
    rows.rows
}

fn exhaustive_pinned_solve(gm: &GameMatrix, k: u64) -> Result<String, String> {
    let n = gm.vertex_count();
    let (ra, rb) = gm.pinned_pair();
    let free: Vec<usize> = (0..gm.region_count()).filter(|&r| r != ra && r != rb).collect();
    let square = gm.matrix().select_columns(&free);
    let mut preimage: HashMap<Vec<u64>, Vec<u64>> = HashMap::new();
    let mut collisions = 0u64;
    PatternWalk::new(&square, k, u64::MAX)
        .map_err(|e| e.to_string())?
        .for_each(|p, image| {
            if preimage.insert(image.to_vec(), p.to_vec()).is_some() {
                collisions += 1;
            }
        });
    if collisions > 0 {
        return Err(format!("{collisions} pinned patterns share an image with another"));
    }
    let mut c = vec![0u64; n];
    let mut solved = 0u64;
    loop {
        let coloring = Coloring::from_u64s(&c);
        let p = gm.solve(&coloring).map_err(|e| format!("coloring {c:?}: {e}"))?;
        let after = gm.apply_pattern(&coloring, &p).map_err(|e| e.to_string())?;
        if !after.is_zero() || !p[ra].is_zero() || !p[rb].is_zero() {
            return Err(format!("coloring {c:?}: solver returned {:?}", residues(&p)));
        }
        let target: Vec<u64> = c.iter().map(|&x| (k - x) % k).collect();
        let free_part: Vec<u64> = free.iter().map(|&r| p[r].to_u64().unwrap_or(u64::MAX)).collect();
        if preimage.get(&target) != Some(&free_part) {
            return Err(format!("coloring {c:?}: solution differs from the brute-force preimage"));
        }
        solved += 1;
        let Some(pos) = c.iter().position(|&x| x + 1 < k) else { break };
        c[pos] += 1;
        c[..pos].iter_mut().for_each(|x| *x = 0);
    }
    Ok(format!("{solved} colorings solved uniquely with regions {ra},{rb} unpushed"))
}

/// Seeded random integer colorings are solved exactly over the integers; on
/// diagrams with reducible vertices also with double counting (`a0 = 2`).
pub fn check_integer(entry: &CorpusEntry) -> Vec<Row> {
    let mut rows = Rows::new(entry, Modulus::Infinite);
    let shadow = shadow_of(entry);
    if !shadow.is_knot() {
        return rows.rows;
    }
    let reducible = shadow.reducible_vertices();
    let mut versions = vec![("integer", GameConfig::new(Modulus::Infinite))];
    if !reducible.is_empty() {
        let doubled = reducible
            .iter()
            .fold(GameConfig::new(Modulus::Infinite), |c, r| c.with_increment(r.vertex, r.two_side_region, 2));
        versions.push(("integer.double", doubled));
    }
    for (check, config) in versions {
        let result = build_game_matrix(shadow.clone(), config)
            .map_err(|e| e.to_string())
            .and_then(|gm| integer_samples(&gm));
        rows.verdict(check, result);
    }
    rows.rows
}

fn integer_samples(gm: &GameMatrix) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(INTEGER_SEED);
    let (ra, rb) = gm.pinned_pair();
    let mut largest = BigInt::zero();
    for _ in 0..INTEGER_SAMPLES {
        let c: Vec<i64> = (0..gm.vertex_count())
            .map(|_| rng.gen_range(INTEGER_RANGE.0..=INTEGER_RANGE.1))
            .collect();
        let coloring = Coloring::from_i64s(&c);
        let p = gm.solve(&coloring).map_err(|e| format!("coloring {c:?}: {e}"))?;
        let image = gm.matrix().mul_vec(&p.0).map_err(|e| e.to_string())?;
        let exact = image.iter().zip(&c).all(|(x, &y)| *x == BigInt::from(-y));
        if !exact || !p[ra].is_zero() || !p[rb].is_zero() {
            return Err(format!("coloring {c:?}: M p != -c"));
        }
        largest = largest.max(algebra::abs_max(&p.0));
    }
    Ok(format!("{INTEGER_SAMPLES} seeded colorings in [{}, {}] solved exactly, largest |p| = {largest}", INTEGER_RANGE.0, INTEGER_RANGE.1))
}

/// Non-loop parts as standalone diagrams with their region maps.
fn part_views(shadow: &DiagramShadow) -> Result<Vec<(DiagramShadow, Vec<usize>)>, String> {
    Ok(connectedly_reducible_parts(shadow)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter_map(|p| p.shadow.map(|s| (s, p.region_map)))
        .collect())
}

/// Balance, equality of one opposite corner pair, and the `+-s` edge push
/// numbers, for every null pattern.
pub fn check_lemmas(entry: &CorpusEntry, k: u64) -> Vec<Row> {
    let mut rows = Rows::new(entry, k);
    let shadow = shadow_of(entry);
    if !shadow.is_knot() {
        return rows.rows;
    }
    let kernel = match default_game(&shadow, Modulus::Finite(k)).and_then(|gm| kernel_of(&gm)) {
        Ok(kernel) => kernel,
        Err(e) => {
            rows.push("lemma.balance", Outcome::Fail, e);
            return rows.rows;
        }
    };
    let irreducible: Vec<usize> = (0..shadow.vertex_count()).filter(|&v| !shadow.is_reducible(v)).collect();

    let unbalanced = kernel
        .iter()
        .flat_map(|p| irreducible.iter().map(move |&v| (p, v)))
        .filter(|(p, v)| shadow.corner_regions(*v).iter().map(|&r| p[r]).sum::<u64>() % k != 0)
        .count();
    rows.verdict(
        "lemma.balance",
        if unbalanced == 0 {
            Ok(format!("{} patterns balanced at {} irreducible vertices", kernel.len(), irreducible.len()))
        } else {
            Err(format!("{unbalanced} (pattern, vertex) pairs unbalanced"))
        },
    );

    let unequal = kernel
        .iter()
        .flat_map(|p| irreducible.iter().map(move |&v| (p, v)))
        .filter(|(p, v)| {
            let c = shadow.corner_regions(*v);
            p[c[0]] != p[c[2]] && p[c[1]] != p[c[3]]
        })
        .count();
    rows.verdict(
        "lemma.opposite_equal",
        if unequal == 0 {
            Ok("every irreducible vertex has an opposite corner pair with equal pushes".into())
        } else {
            Err(format!("{unequal} (pattern, vertex) pairs with both opposite pairs unequal"))
        },
    );

    let result = part_views(&shadow).and_then(|parts| {
        let mut edges = 0;
        for (sub, map) in &parts {
            for p in &kernel {
                let sigma = |e: usize| {
                    let (a, b) = sub.edge_sides(e);
                    (p[map[a]] + p[map[b]]) % k
                };
                let s = sigma(0);
                if let Some(e) = (0..sub.edges().len()).find(|&e| sigma(e) != s && sigma(e) != (k - s) % k) {
                    return Err(format!("{}: edge {e} has push number {} outside +-{s}", sub.name(), sigma(e)));
                }
                for v in 0..sub.vertex_count() {
                    for slot in 0..2 {
                        let (e1, e2) = (sub.slot_edge(v, slot), sub.slot_edge(v, slot + 2));
                        if (sigma(e1) + sigma(e2)) % k != 0 {
                            return Err(format!("{}: edges {e1},{e2} through vertex {v} do not flip sign", sub.name()));
                        }
                    }
                }
            }
            edges += sub.edges().len();
        }
        Ok(format!("{} parts, {edges} edges carry +-s with flips along each strand", parts.len()))
    });
    rows.verdict("lemma.push_number", result);

    if shadow.is_reduced() {
        let result = shadow
            .checkerboard_shading()
            .map_err(|e| e.to_string())
            .and_then(|shading| distance_lemma(&shadow, &shading, &kernel, k));
        rows.verdict("lemma.distance", result);
    }
    rows.rows
}

/// `l(r1) - l(r2)` is `2is` with `|2i| <= d(r1, r2)` for same-shade regions.
fn distance_lemma(shadow: &DiagramShadow, shading: &Shading, kernel: &[Vec<u64>], k: u64) -> Result<String, String> {
    let distances = shadow.dual_distances();
    let mut pairs = 0;
    for p in kernel {
        let (a, b) = shadow.edge_sides(0);
        let s = (p[a] + p[b]) % k;
        for r1 in 0..shadow.region_count() {
            for r2 in r1 + 1..shadow.region_count() {
                if shading.shade(r1) != shading.shade(r2) {
                    continue;
                }
                pairs += 1;
                let d = distances[r1][r2] as i64;
                let diff = (p[r1] + k - p[r2]) % k;
                let reachable = (-d / 2..=d / 2).any(|i| (2 * i * s as i64).rem_euclid(k as i64) as u64 == diff);
                if !reachable {
                    return Err(format!("regions {r1},{r2} at distance {d} differ by {diff} with s = {s}"));
                }
            }
        }
    }
    Ok(format!("{pairs} (pattern, same-shade pair) cases within 2is"))
}

/// Kernel shape and the `2^(n+2-i)` / `2^(n+1-i)` counts for `k = 2`, with
/// brute-force column-space counting.
pub fn check_thm2(entry: &CorpusEntry, budget: u64) -> Vec<Row> {
    let mut rows = Rows::new(entry, 2);
    let shadow = shadow_of(entry);
    if !shadow.is_knot() || !shadow.is_reduced() {
        return rows.rows;
    }
    let (gm, kernel, shading) = match prepare(&shadow, 2) {
        Ok(x) => x,
        Err(e) => {
            rows.push("thm2.kernel", Outcome::Fail, e);
            return rows.rows;
        }
    };
    let m = gm.region_count();
    let indicator = |shade: Option<Shade>| -> Vec<u64> {
        (0..m).map(|r| u64::from(shade.is_none_or(|s| shading.shade(r) == s))).collect()
    };
    let expected: BTreeSet<Vec<u64>> = [vec![0; m], indicator(Some(Shade::Shaded)), indicator(Some(Shade::Unshaded)), indicator(None)]
        .into_iter()
        .collect();
    let found: BTreeSet<Vec<u64>> = kernel.iter().cloned().collect();
    rows.verdict(
        "thm2.kernel",
        if found == expected {
            Ok("kernel is {0, shaded, unshaded, all}".into())
        } else {
            Err(format!("kernel {found:?}"))
        },
    );
    let n = gm.vertex_count() as u32;
    let sets = subsets(&(0..m).collect::<Vec<_>>(), MAX_UNPUSHED);
    let expect = |s: &[usize]| {
        let i = s.len() as u32;
        let mixed = s.iter().any(|&r| shading.shade(r) != shading.shade(s[0]));
        if mixed { 1u64 << (n + 2 - i) } else { 1u64 << (n + 1 - i) }
    };
    count_rows(&mut rows, "thm2", &gm, &kernel, &sets, expect, 2, budget);
    rows.rows
}

fn prepare(shadow: &Arc<DiagramShadow>, k: u64) -> Result<(GameMatrix, Vec<Vec<u64>>, Shading), String> {
    let gm = default_game(shadow, Modulus::Finite(k))?;
    let kernel = kernel_of(&gm)?;
    let shading = shadow.checkerboard_shading().map_err(|e| e.to_string())?;
    Ok((gm, kernel, shading))
}

/// Compares `q = k^(m-i) / j` with `expect(S)` for each set, then counts the
/// column spaces by brute force. Rows: `<name>.counts` and `<name>.brute`.
#[allow(clippy::too_many_arguments)]
fn count_rows(
    rows: &mut Rows,
    name: &str,
    gm: &GameMatrix,
    kernel: &[Vec<u64>],
    sets: &[Vec<usize>],
    expect: impl Fn(&[usize]) -> u64,
    k: u64,
    budget: u64,
) {
    let m = gm.region_count();
    let mut counts = Vec::with_capacity(sets.len());
    let mut wrong = Vec::new();
    for s in sets {
        let j = vanishing(kernel, s);
        let total = power(k, m - s.len()).expect("desk-scale diagrams");
        let q = total / j;
        if !total.is_multiple_of(j) || q != expect(s) {
            wrong.push(format!("S={s:?}: q={q} expected {}", expect(s)));
        }
        counts.push(q);
    }
    rows.verdict(
        &format!("{name}.counts"),
        if wrong.is_empty() {
            Ok(format!("{} region sets with 1 <= i <= {MAX_UNPUSHED} match", sets.len()))
        } else {
            Err(wrong.join("; "))
        },
    );

    let mut budget = Budget::new(budget);
    if !sets.iter().all(|s| budget.take(k, m - s.len())) {
        rows.push(&format!("{name}.brute"), Outcome::Skip, "column-space counting exceeds the budget");
        return;
    }
    let mismatched: Vec<String> = sets
        .iter()
        .zip(&counts)
        .filter(|(s, &q)| image_without(gm, k, s) != q)
        .map(|(s, _)| format!("{s:?}"))
        .collect();
    rows.verdict(
        &format!("{name}.brute"),
        if mismatched.is_empty() {
            Ok(format!("{} column spaces counted by brute force agree", sets.len()))
        } else {
            Err(format!("brute force disagrees for {}", mismatched.join(", ")))
        },
    );
}

/// Unique solvability without pushing a shaded and an unshaded region: every
/// such pair for `k` a power of two, otherwise pairs closer than the smallest
/// odd prime factor of `k`. Farther pairs are recorded without assertion.
pub fn check_thmp(entry: &CorpusEntry, k: u64, budget: u64) -> Vec<Row> {
    let mut rows = Rows::new(entry, k);
    let shadow = shadow_of(entry);
    if !shadow.is_knot() || !shadow.is_reduced() {
        return rows.rows;
    }
    let (gm, kernel, shading) = match prepare(&shadow, k) {
        Ok(x) => x,
        Err(e) => {
            rows.push("thmp", Outcome::Fail, e);
            return rows.rows;
        }
    };
    let distances = shadow.dual_distances();
    let pairs: Vec<(usize, usize, usize)> = shading
        .regions_with(Shade::Shaded)
        .into_iter()
        .flat_map(|a| shading.regions_with(Shade::Unshaded).into_iter().map(move |b| (a, b)))
        .map(|(a, b)| (a, b, distances[a][b]))
        .collect();
    prime_rows(&mut rows, "thmp", &gm, &kernel, &pairs, k, budget);
    rows.rows
}

fn prime_rows(rows: &mut Rows, name: &str, gm: &GameMatrix, kernel: &[Vec<u64>], pairs: &[(usize, usize, usize)], k: u64, budget: u64) {
    let p = smallest_odd_prime_factor(k);
    let (asserted, silent): (Vec<_>, Vec<_>) = pairs.iter().partition(|&&(_, _, d)| p.is_none_or(|p| (d as u64) < p));
    let bad: Vec<String> = asserted
        .iter()
        .filter(|&&&(a, b, _)| vanishing(kernel, &[a, b]) != 1)
        .map(|(a, b, d)| format!("({a},{b}) at distance {d}"))
        .collect();
    let bound = p.map_or("k is a power of two".to_string(), |p| format!("distance < {p}"));
    rows.verdict(
        name,
        if bad.is_empty() {
            Ok(format!("{} mixed pairs with {bound} admit only the zero null pattern", asserted.len()))
        } else {
            Err(format!("nontrivial null patterns vanish on {}", bad.join(", ")))
        },
    );
    if !silent.is_empty() {
        let listed: Vec<String> = silent
            .iter()
            .map(|&&(a, b, d)| format!("({a},{b}) d={d} j={}", vanishing(kernel, &[a, b])))
            .collect();
        rows.push(&format!("{name}.far"), Outcome::Info, listed.join(", "));
    }
    let n = gm.vertex_count();
    let mut budget = Budget::new(budget);
    if !asserted.iter().all(|_| budget.take(k, n)) {
        rows.push(&format!("{name}.brute"), Outcome::Skip, "column-space counting exceeds the budget");
        return;
    }
    let total = power(k, n).expect("within budget");
    let short: Vec<String> = asserted
        .iter()
        .filter(|&&&(a, b, _)| image_without(gm, k, &[a, b]) != total)
        .map(|(a, b, _)| format!("({a},{b})"))
        .collect();
    rows.verdict(
        &format!("{name}.brute"),
        if short.is_empty() {
            Ok(format!("all {k}^{n} colorings reachable for each asserted pair"))
        } else {
            Err(format!("not every coloring is reachable for {}", short.join(", ")))
        },
    );
}

/// A shading of `shadow` whose unshaded side admits an alternating signing,
/// preferring the canonical one.
pub fn signable_shading(shadow: &DiagramShadow) -> Option<(Shading, SignAssignment)> {
    let canonical = shadow.checkerboard_shading().ok()?;
    [canonical.clone(), canonical.complement()]
        .into_iter()
        .find_map(|s| alternating_signing(shadow, &s, Shade::Unshaded).map(|signing| (s, signing)))
}

/// Expected `q` for a region set under the alternating-signing count formulas.
fn signed_count(shading: &Shading, signing: &SignAssignment, n: usize, k: u64, s: &[usize]) -> u64 {
    let i = s.len();
    let shades: BTreeSet<Shade> = s.iter().map(|&r| shading.shade(r)).collect();
    let signs: BTreeSet<Sign> = s.iter().filter_map(|r| signing.signs.get(r).copied()).collect();
    let full = power(k, n + 2 - i).expect("desk-scale diagrams");
    if shades.len() == 2 {
        full
    } else if shades.contains(&Shade::Shaded) || signs.len() == 1 {
        full / k
    } else if k % 2 == 1 {
        full
    } else {
        full / 2
    }
}

/// The `l_{a,b}` family is the kernel, and the three counting cases,
/// including halving for even `k`, hold for every region set.
pub fn check_thmk(entry: &CorpusEntry, k: u64, budget: u64) -> Vec<Row> {
    let mut rows = Rows::new(entry, k);
    let shadow = shadow_of(entry);
    if !shadow.is_knot() || !shadow.is_reduced() {
        return rows.rows;
    }
    let Some((shading, signing)) = signable_shading(&shadow) else {
        return rows.rows;
    };
    let (gm, kernel) = match default_game(&shadow, Modulus::Finite(k)).and_then(|gm| kernel_of(&gm).map(|kn| (gm, kn))) {
        Ok(x) => x,
        Err(e) => {
            rows.push("thmk.family", Outcome::Fail, e);
            return rows.rows;
        }
    };
    let mut family = BTreeSet::new();
    let mut invalid = None;
    for a in 0..k {
        for b in 0..k {
            match gm.nullpattern_family_ab(&shading, &signing, &BigInt::from(a), &BigInt::from(b)) {
                Ok(p) => {
                    family.insert(residues(&p));
                }
                Err(e) => invalid = Some(format!("(a,b)=({a},{b}): {e}")),
            }
        }
    }
    let kernel_set: BTreeSet<Vec<u64>> = kernel.iter().cloned().collect();
    rows.verdict(
        "thmk.family",
        match invalid {
            Some(e) => Err(e),
            None if family == kernel_set => Ok(format!("{} patterns l_(a,b) form the kernel", family.len())),
            None => Err(format!("family has {} patterns, kernel {}", family.len(), kernel_set.len())),
        },
    );
    let n = gm.vertex_count();
    let sets = subsets(&(0..gm.region_count()).collect::<Vec<_>>(), MAX_UNPUSHED);
    count_rows(&mut rows, "thmk", &gm, &kernel, &sets, |s| signed_count(&shading, &signing, n, k, s), k, budget);

    let pairs = unique_pairs(&shading, &signing, k);
    let bad: Vec<String> = pairs
        .iter()
        .filter(|&&(a, b)| vanishing(&kernel, &[a, b]) != 1)
        .map(|(a, b)| format!("({a},{b})"))
        .collect();
    rows.verdict(
        "thmk.unique",
        if bad.is_empty() {
            Ok(format!("{} pairs solve uniquely", pairs.len()))
        } else {
            Err(format!("nontrivial null patterns vanish on {}", bad.join(", ")))
        },
    );
    rows.rows
}

/// Pairs that must leave only the zero null pattern: every shaded/unshaded
/// pair, and for odd `k` every oppositely signed unshaded pair.
fn unique_pairs(shading: &Shading, signing: &SignAssignment, k: u64) -> Vec<(usize, usize)> {
    let shaded = shading.regions_with(Shade::Shaded);
    let unshaded = shading.regions_with(Shade::Unshaded);
    let mut pairs: Vec<(usize, usize)> = shaded.iter().flat_map(|&a| unshaded.iter().map(move |&b| (a, b))).collect();
    if k % 2 == 1 {
        for (i, &a) in unshaded.iter().enumerate() {
            for &b in &unshaded[i + 1..] {
                if signing.signs.get(&a) != signing.signs.get(&b) {
                    pairs.push((a, b));
                }
            }
        }
    }
    pairs
}

/// For each connectedly reducible part: the restriction of null patterns to
/// the part is a bijection onto the part's own kernel, vanishing counts agree
/// on every subset of the part's regions, and the reduced-diagram theorems
/// hold for regions of the part.
pub fn check_section6(entry: &CorpusEntry, k: u64) -> Vec<Row> {
    let mut rows = Rows::new(entry, k);
    let shadow = shadow_of(entry);
    if !shadow.is_knot() || shadow.is_reduced() {
        return rows.rows;
    }
    let (gm, kernel, shading) = match prepare(&shadow, k) {
        Ok(x) => x,
        Err(e) => {
            rows.push("part", Outcome::Fail, e);
            return rows.rows;
        }
    };
    let parts = match connectedly_reducible_parts(&shadow) {
        Ok(p) => p,
        Err(e) => {
            rows.push("part", Outcome::Fail, e.to_string());
            return rows.rows;
        }
    };
    for (index, part) in parts.iter().enumerate() {
        let label = format!("part{index}");
        // a loop part has no crossings: its kernel is every pattern on its regions
        let (local_kernel, map): (Vec<Vec<u64>>, Vec<usize>) = match &part.shadow {
            None => {
                let dims = part.regions.len();
                let all = (0..power(k, dims).expect("a loop has two regions"))
                    .map(|mut x| {
                        (0..dims)
                            .map(|_| {
                                let d = x % k;
                                x /= k;
                                d
                            })
                            .collect()
                    })
                    .collect();
                (all, part.regions.clone())
            }
            Some(sub) => {
                match default_game(&Arc::new(sub.clone()), Modulus::Finite(k)).and_then(|g| {
                    let expected = restricted_matrix(&gm, &part.vertices, &part.region_map);
                    if g.matrix() != &expected {
                        return Err("part matrix differs from the restricted game matrix".to_string());
                    }
                    kernel_of(&g)
                }) {
                    Ok(kn) => (kn, part.region_map.clone()),
                    Err(e) => {
                        rows.push(&format!("{label}.bijection"), Outcome::Fail, e);
                        continue;
                    }
                }
            }
        };
        let restricted: Vec<Vec<u64>> = kernel.iter().map(|p| map.iter().map(|&r| p[r]).collect()).collect();
        let images: BTreeSet<&Vec<u64>> = restricted.iter().collect();
        let targets: BTreeSet<&Vec<u64>> = local_kernel.iter().collect();
        let kind = if part.is_loop { "loop" } else { "reduced" };
        let bijective = images.len() == kernel.len() && images == targets;
        let local: Vec<usize> = (0..map.len()).collect();
        let disagree: Vec<String> = subsets(&local, local.len())
            .into_iter()
            .filter(|s| {
                let original: Vec<usize> = s.iter().map(|&r| map[r]).collect();
                vanishing(&kernel, &original) != vanishing(&local_kernel, s)
            })
            .map(|s| format!("{:?}", s.iter().map(|&r| map[r]).collect::<Vec<_>>()))
            .collect();
        rows.verdict(
            &format!("{label}.bijection"),
            if !bijective {
                Err(format!("restriction to regions {:?} is not a bijection onto the part kernel", part.regions))
            } else if !disagree.is_empty() {
                Err(format!("vanishing counts differ for {}", disagree.join(", ")))
            } else {
                Ok(format!(
                    "{kind} part on regions {:?}: {} null patterns restrict bijectively, {} region sets agree",
                    part.regions,
                    kernel.len(),
                    (1u64 << local.len()) - 1
                ))
            },
        );
        let Some(sub) = &part.shadow else {
            rows.push(&format!("{label}.theorems"), Outcome::Info, "loop part: no counting claims");
            continue;
        };
        part_theorems(&mut rows, &label, &gm, &kernel, &shading, sub, &part.region_map, k);
    }
    rows.rows
}

fn restricted_matrix(gm: &GameMatrix, vertices: &[usize], region_map: &[usize]) -> ExactMatrix {
    gm.matrix().select_rows(vertices).select_columns(region_map)
}

/// Counting assertions for regions of a part, evaluated on the full diagram
/// with the induced shading and, when it exists, the part's signing.
#[allow(clippy::too_many_arguments)]
fn part_theorems(
    rows: &mut Rows,
    label: &str,
    gm: &GameMatrix,
    kernel: &[Vec<u64>],
    shading: &Shading,
    sub: &DiagramShadow,
    map: &[usize],
    k: u64,
) {
    let induced = Shading(map.iter().map(|&r| shading.shade(r)).collect());
    if sub.shading_violations(&induced) != 0 {
        rows.push(&format!("{label}.shading"), Outcome::Fail, "shading does not restrict to a checkerboard shading of the part");
        return;
    }
    let n = gm.vertex_count();
    let m = gm.region_count();
    let local: Vec<usize> = (0..map.len()).collect();
    let sets = subsets(&local, MAX_UNPUSHED);
    let q_of = |s: &[usize]| {
        let original: Vec<usize> = s.iter().map(|&r| map[r]).collect();
        power(k, m - s.len()).expect("desk-scale diagrams") / vanishing(kernel, &original)
    };
    let check = |expect: &dyn Fn(&[usize]) -> u64| -> Result<String, String> {
        let wrong: Vec<String> = sets
            .iter()
            .filter(|s| q_of(s) != expect(s))
            .map(|s| format!("{:?}", s.iter().map(|&r| map[r]).collect::<Vec<_>>()))
            .collect();
        if wrong.is_empty() {
            Ok(format!("{} region sets of the part match", sets.len()))
        } else {
            Err(format!("counts differ for {}", wrong.join(", ")))
        }
    };

    if k == 2 {
        let two = |s: &[usize]| {
            let mixed = s.iter().any(|&r| induced.shade(r) != induced.shade(s[0]));
            1u64 << (n + 2 - s.len() - usize::from(!mixed))
        };
        rows.verdict(&format!("{label}.thm2"), check(&two));
    }

    let distances = sub.dual_distances();
    let p = smallest_odd_prime_factor(k);
    let bad: Vec<String> = induced
        .regions_with(Shade::Shaded)
        .into_iter()
        .flat_map(|a| induced.regions_with(Shade::Unshaded).into_iter().map(move |b| (a, b)))
        .filter(|&(a, b)| p.is_none_or(|p| (distances[a][b] as u64) < p))
        .filter(|&(a, b)| vanishing(kernel, &[map[a], map[b]]) != 1)
        .map(|(a, b)| format!("({},{})", map[a], map[b]))
        .collect();
    rows.verdict(
        &format!("{label}.thmp"),
        if bad.is_empty() {
            Ok("mixed pairs within the prime bound solve uniquely".into())
        } else {
            Err(format!("nontrivial null patterns vanish on {}", bad.join(", ")))
        },
    );

    if let Some(signing) = alternating_signing(sub, &induced, Shade::Unshaded) {
        rows.verdict(&format!("{label}.thmk"), check(&|s| signed_count(&induced, &signing, n, k, s)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trefoil_suite_passes() {
        let corpus = Corpus::builtin().select(&["trefoil"]);
        let report = run_suite(&corpus, &[Modulus::Finite(2), Modulus::Finite(3)], algebra::DEFAULT_BUDGET);
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.count(Outcome::Skip), 0);
    }

    #[test]
    fn tiny_budget_skips_brute_force() {
        let corpus = Corpus::builtin().select(&["trefoil"]);
        let report = run_suite(&corpus, &[Modulus::Finite(3)], 10);
        assert!(report.passed());
        assert!(report.rows.iter().any(|r| r.check == "kernel" && r.status == Outcome::Skip));
    }

    #[test]
    fn report_is_deterministic() {
        let corpus = Corpus::builtin().select(&["curl", "figure_eight"]);
        let ks = [Modulus::Finite(2), Modulus::Infinite];
        let a = run_suite(&corpus, &ks, 1000);
        let b = run_suite(&corpus, &ks, 1000);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn odd_prime_factors() {
        assert_eq!(smallest_odd_prime_factor(8), None);
        assert_eq!(smallest_odd_prime_factor(6), Some(3));
        assert_eq!(smallest_odd_prime_factor(35), Some(5));
    }

    #[test]
    fn subsets_by_size() {
        assert_eq!(subsets(&[4, 5, 6], 2), vec![vec![4], vec![5], vec![6], vec![4, 5], vec![4, 6], vec![5, 6]]);
    }

    #[test]
    fn mismatched_flags_fail_the_structure_row() {
        let mut corpus = Corpus::builtin().select(&["trefoil"]);
        corpus.entries[0].flags.reduced = false;
        let rows = check_structure(&corpus.entries[0]);
        assert_eq!(rows[0].status, Outcome::Fail);
    }
}
