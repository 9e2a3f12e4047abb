//! Brute-force oracles written directly against the diagram's corner data,
//! independent of the library's matrix and elimination code.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use region_select::diagram::DiagramShadow;
use region_select::verify::Corpus;

pub fn corpus() -> Vec<(String, Arc<DiagramShadow>)> {
    Corpus::builtin()
        .entries
        .into_iter()
        .map(|e| (e.name, e.shadow.expect("bundled diagrams parse")))
        .collect()
}

pub fn named(name: &str) -> Arc<DiagramShadow> {
    corpus().into_iter().find(|(n, _)| n == name).expect("corpus entry").1
}

/// Vertex-by-region 0/1 incidence.
pub fn incidence(shadow: &DiagramShadow) -> Vec<Vec<i64>> {
    (0..shadow.vertex_count())
        .map(|v| {
            let corners = shadow.corner_regions(v);
            (0..shadow.region_count()).map(|r| i64::from(corners.contains(&r))).collect()
        })
        .collect()
}

/// Every vector of `Z_k^m`, first coordinate fastest.
pub fn patterns(k: u64, m: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = k.pow(m as u32);
    (0..total).map(move |mut x| {
        (0..m)
            .map(|_| {
                let d = x % k;
                x /= k;
                d
            })
            .collect()
    })
}

pub fn image(a: &[Vec<i64>], p: &[u64], k: u64) -> Vec<u64> {
    a.iter()
        .map(|row| row.iter().zip(p).map(|(&x, &y)| x as u64 * y).sum::<u64>() % k)
        .collect()
}

pub fn kernel(shadow: &DiagramShadow, k: u64) -> BTreeSet<Vec<u64>> {
    let a = incidence(shadow);
    patterns(k, shadow.region_count())
        .filter(|p| image(&a, p, k).iter().all(|&x| x == 0))
        .collect()
}

/// Number of colorings `M p` reachable with `p` zero on `unpushed`.
pub fn reachable_without(shadow: &DiagramShadow, k: u64, unpushed: &[usize]) -> u64 {
    let a = incidence(shadow);
    let seen: HashSet<Vec<u64>> = patterns(k, shadow.region_count())
        .filter(|p| unpushed.iter().all(|&r| p[r] == 0))
        .map(|p| image(&a, &p, k))
        .collect();
    seen.len() as u64
}

pub fn vanishing(kernel: &BTreeSet<Vec<u64>>, regions: &[usize]) -> usize {
    kernel.iter().filter(|p| regions.iter().all(|&r| p[r] == 0)).count()
}

/// All subsets of `items` with `1..=max` elements.
pub fn subsets(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << items.len()) {
        if mask.count_ones() as usize <= max {
            out.push((0..items.len()).filter(|i| mask >> i & 1 == 1).map(|i| items[i]).collect());
        }
    }
    out
}

pub fn to_u64s(p: &[num_bigint::BigInt]) -> Vec<u64> {
    p.iter().map(|x| u64::try_from(x).expect("reduced entry")).collect()
}
