//! Exact linear algebra over `Z_k` and over the integers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("operation needs a finite modulus")]
    InfiniteModulus,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("system is not uniquely solvable mod {modulus}: determinant {determinant}")]
    NotUniquelySolvable { modulus: u64, determinant: BigInt },
    #[error("system has no integral solution")]
    NoIntegralSolution,
    #[error("enumeration of {size} vectors exceeds the budget of {budget}")]
    BudgetExceeded { size: String, budget: u64 },
    #[error("internal error: inexact division in fraction-free elimination")]
    InexactDivision,
}

/// `Z_k` for finite `k >= 2`, or the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulus {
    Finite(u64),
    Infinite,
}

impl Modulus {
    pub fn finite(k: u64) -> Result<Modulus, AlgebraError> {
        if k < 2 {
            return Err(AlgebraError::BadModulus(k));
        }
        Ok(Modulus::Finite(k))
    }

    pub fn value(self) -> Option<u64> {
        match self {
            Modulus::Finite(k) => Some(k),
            Modulus::Infinite => None,
        }
    }

    pub fn require_finite(self) -> Result<u64, AlgebraError> {
        self.value().ok_or(AlgebraError::InfiniteModulus)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Modulus::Finite(_))
    }

    /// Canonical representative: `[0, k)` for finite `k`, unchanged otherwise.
    pub fn reduce(self, x: &BigInt) -> BigInt {
        match self {
            Modulus::Finite(k) => x.mod_floor(&BigInt::from(k)),
            Modulus::Infinite => x.clone(),
        }
    }

    pub fn reduce_all(self, xs: &[BigInt]) -> Vec<BigInt> {
        xs.iter().map(|x| self.reduce(x)).collect()
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Finite(k) => write!(f, "{k}"),
            Modulus::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Modulus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Modulus::Infinite),
            t => {
                let k: u64 = t.parse().map_err(|_| format!("invalid modulus {t:?}"))?;
                Modulus::finite(k).map_err(|e| e.to_string())
            }
        }
    }
}

impl Serialize for Modulus {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Modulus::Finite(k) => serializer.serialize_u64(*k),
            Modulus::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Modulus {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(k) => Modulus::finite(k).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// True iff `a` is a unit (equivalently, not a zero divisor) in `Z_k`.
pub fn is_unit(a: &BigInt, k: Modulus) -> Result<bool, AlgebraError> {
    let k = BigInt::from(k.require_finite()?);
    Ok(a.mod_floor(&k).gcd(&k).is_one())
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x.into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>, AlgebraError> {
        if x.len() != self.cols {
            return Err(AlgebraError::Dimension {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn select_columns(&self, cols: &[usize]) -> ExactMatrix {
        let mut m = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                m.set(i, jj, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> ExactMatrix {
        let mut m = Self::zeros(rows.len(), self.cols);
        for (ii, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                m.set(ii, j, self.get(i, j).clone());
            }
        }
        m
    }

    /// Entries reduced to `[0, k)` as machine integers.
    pub fn residues(&self, k: u64) -> Vec<Vec<u64>> {
        let kb = BigInt::from(k);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.mod_floor(&kb).to_u64().unwrap())
                    .collect()
            })
            .collect()
    }
}

/// Outcome of fraction-free elimination on a square system `A x = b`:
/// `determinant = det(A)` and `scaled_solution = det(A) * x`, which is integral.
#[derive(Debug, Clone, PartialEq)]
pub struct Elimination {
    pub determinant: BigInt,
    pub scaled_solution: Vec<BigInt>,
}

fn exact_div(num: BigInt, den: &BigInt) -> Result<BigInt, AlgebraError> {
    let (q, r) = num.div_rem(den);
    if !r.is_zero() {
        return Err(AlgebraError::InexactDivision);
    }
    Ok(q)
}

/// Fraction-free Gauss-Jordan elimination (Bareiss) on the augmented matrix
/// `[A | b]`. Pivots are the first nonzero entry in row order.
pub fn fraction_free_solve(a: &ExactMatrix, b: &[BigInt]) -> Result<Elimination, AlgebraError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(AlgebraError::NotSquare { rows: n, cols: a.cols() });
    }
    if b.len() != n {
        return Err(AlgebraError::Dimension { expected: n, found: b.len() });
    }
    let w = n + 1;
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero()).ok_or(AlgebraError::Singular)?;
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        let pivot_row = m[k].clone();
        let pivot = pivot_row[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = row[k].clone();
            for j in 0..w {
                if j == k {
                    continue;
                }
                let num = &pivot * &row[j] - &factor * &pivot_row[j];
                row[j] = exact_div(num, &prev)?;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot;
    }
    // every diagonal entry now equals det of the row-permuted matrix
    let sign = if negate { -BigInt::one() } else { BigInt::one() };
    Ok(Elimination {
        determinant: &sign * &prev,
        scaled_solution: m.into_iter().map(|row| &sign * &row[n]).collect(),
    })
}

pub fn determinant(a: &ExactMatrix) -> Result<BigInt, AlgebraError> {
    match fraction_free_solve(a, &vec![BigInt::zero(); a.rows()]) {
        Ok(e) => Ok(e.determinant),
        Err(AlgebraError::Singular) => Ok(BigInt::zero()),
        Err(e) => Err(e),
    }
}

/// Solves `A x = b (mod k)` for square `A` whose determinant is a unit mod `k`.
pub fn solve_unit_square(a: &ExactMatrix, b: &[BigInt], k: Modulus) -> Result<Vec<BigInt>, AlgebraError> {
    let k = k.require_finite()?;
    let kb = BigInt::from(k);
    let elim = match fraction_free_solve(a, b) {
        Err(AlgebraError::Singular) => {
            return Err(AlgebraError::NotUniquelySolvable {
                modulus: k,
                determinant: BigInt::zero(),
            })
        }
        other => other?,
    };
    let d = elim.determinant.mod_floor(&kb);
    let inverse = mod_inverse(&d, &kb).ok_or_else(|| AlgebraError::NotUniquelySolvable {
        modulus: k,
        determinant: elim.determinant.clone(),
    })?;
    Ok(elim
        .scaled_solution
        .iter()
        .map(|y| (y * &inverse).mod_floor(&kb))
        .collect())
}

/// Solves `A x = b` over the integers; fails unless the unique rational
/// solution is integral.
pub fn solve_integer_square(a: &ExactMatrix, b: &[BigInt]) -> Result<Vec<BigInt>, AlgebraError> {
    let elim = fraction_free_solve(a, b)?;
    elim.scaled_solution
        .iter()
        .map(|y| {
            let (q, r) = y.div_rem(&elim.determinant);
            if r.is_zero() {
                Ok(q)
            } else {
                Err(AlgebraError::NoIntegralSolution)
            }
        })
        .collect()
}

pub fn mod_inverse(a: &BigInt, k: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(k).extended_gcd(k);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(k))
    } else {
        None
    }
}

/// `k^m` if it does not exceed `budget`.
pub fn checked_space_size(k: u64, m: usize, budget: u64) -> Result<u64, AlgebraError> {
    let size = u32::try_from(m).ok().and_then(|m| k.checked_pow(m));
    match size {
        Some(s) if s <= budget => Ok(s),
        _ => Err(AlgebraError::BudgetExceeded {
            size: format!("{k}^{m}"),
            budget,
        }),
    }
}

/// Odometer over `Z_k^m` that tracks `A p (mod k)` incrementally: each step
/// bumps one or more coordinates and adds the matching columns.
pub struct PatternWalk {
    columns: Vec<Vec<u64>>,
    k: u64,
    pattern: Vec<u64>,
    image: Vec<u64>,
    remaining: u64,
}

impl PatternWalk {
    pub fn new(a: &ExactMatrix, k: u64, budget: u64) -> Result<Self, AlgebraError> {
        let total = checked_space_size(k, a.cols(), budget)?;
        let res = a.residues(k);
        let columns = (0..a.cols()).map(|j| (0..a.rows()).map(|i| res[i][j]).collect()).collect();
        Ok(PatternWalk {
            columns,
            k,
            pattern: vec![0; a.cols()],
            image: vec![0; a.rows()],
            remaining: total,
        })
    }

    /// Visits every pattern once with its image `A p mod k`.
    pub fn for_each(mut self, mut visit: impl FnMut(&[u64], &[u64])) {
        while self.remaining > 0 {
            visit(&self.pattern, &self.image);
            self.remaining -= 1;
            if self.remaining == 0 {
                break;
            }
            for pos in 0..self.pattern.len() {
                self.pattern[pos] = (self.pattern[pos] + 1) % self.k;
                for (slot, &c) in self.image.iter_mut().zip(&self.columns[pos]) {
                    *slot = (*slot + c) % self.k;
                }
                if self.pattern[pos] != 0 {
                    break;
                }
            }
        }
    }
}

/// Exhaustive `{p in Z_k^m : A p = 0 (mod k)}`, sorted lexicographically.
pub fn brute_force_kernel(a: &ExactMatrix, k: Modulus, budget: u64) -> Result<Vec<Vec<u64>>, AlgebraError> {
    let k = k.require_finite()?;
    let mut out = Vec::new();
    PatternWalk::new(a, k, budget)?.for_each(|p, image| {
        if image.iter().all(|&x| x == 0) {
            out.push(p.to_vec());
        }
    });
    out.sort();
    Ok(out)
}

/// Exhaustive size of the column space `{A p (mod k)}`.
pub fn brute_force_image_size(a: &ExactMatrix, k: Modulus, budget: u64) -> Result<u64, AlgebraError> {
    let k = k.require_finite()?;
    let mut seen = std::collections::HashSet::new();
    PatternWalk::new(a, k, budget)?.for_each(|_, image| {
        seen.insert(image.to_vec());
    });
    Ok(seen.len() as u64)
}

pub fn to_bigints(xs: &[u64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn is_zero_mod(xs: &[BigInt], k: Modulus) -> bool {
    xs.iter().all(|x| k.reduce(x).is_zero())
}

pub fn abs_max(xs: &[BigInt]) -> BigInt {
    xs.iter().map(|x| x.abs()).max().unwrap_or_default()
}
