//! Linear algebra over small prime fields: matrices, subspaces in reduced row
//! echelon form, and the subspace lattice.

mod lattice;
mod rep;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};

pub use lattice::{
    check_lattice_submodular, minimize_on_lattice, minimize_over, subspaces_of, DeltaA, DimFunction, LatticeFunction,
    LatticeMinimizationResult, LatticeSubmodularVerdict,
};
pub use rep::{GammaW, Representation};

/// Supported field sizes.
pub const PRIMES: [u32; 4] = [2, 3, 5, 7];

pub fn check_prime(p: u32) -> Result<()> {
    if PRIMES.contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("field size {p} is not one of {PRIMES:?}")))
    }
}

#[inline]
fn inv_mod(a: u32, p: u32) -> u32 {
    // a^(p-2) for a prime p.
    let mut r = 1u32;
    for _ in 0..p - 2 {
        r = r * a % p;
    }
    r
}

/// Brings `rows` to reduced row echelon form in place and drops zero rows.
/// Returns the pivot columns.
fn rref(rows: &mut Vec<Vec<u32>>, p: u32) -> Vec<usize> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(i) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, i);
        let inv = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let factor = rows[i][c];
                for j in 0..cols {
                    rows[i][j] = (rows[i][j] + (p - factor) * rows[r][j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// A `rows × cols` matrix over `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl FpMatrix {
    /// Entries are given row by row and reduced mod `p`.
    pub fn new(p: u32, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        check_prime(p)?;
        if data.len() != rows * cols {
            return Err(Error::Structural(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(FpMatrix { p, rows, cols, data: data.into_iter().map(|x| x % p).collect() })
    }

    pub fn from_rows(p: u32, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Structural("ragged matrix rows".into()));
        }
        FpMatrix::new(p, rows.len(), cols, rows.concat())
    }

    pub fn identity(p: u32, d: usize) -> Result<Self> {
        let mut data = vec![0; d * d];
        for i in 0..d {
            data[i * d + i] = 1;
        }
        FpMatrix::new(p, d, d, data)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.p != other.p || self.cols != other.rows {
            return Err(Error::Structural(format!(
                "cannot multiply {}x{} over F{} by {}x{} over F{}",
                self.rows, self.cols, self.p, other.rows, other.cols, other.p
            )));
        }
        let mut data = vec![0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] = (data[i * other.cols + j] + a * other.get(k, j)) % self.p;
                }
            }
        }
        Ok(FpMatrix { p: self.p, rows: self.rows, cols: other.cols, data })
    }

    /// `M v` for a column vector `v`.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0, |acc, j| (acc + self.get(i, j) * v[j]) % self.p))
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u32>> = self.data.chunks(self.cols.max(1)).map(|r| r.to_vec()).collect();
        if self.cols == 0 {
            return 0;
        }
        rref(&mut rows, self.p).len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

/// A subspace of `F_p^d` stored by its reduced row echelon basis, which is
/// unique; equality of subspaces is equality of these bases.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    p: u32,
    ambient: usize,
    basis: Vec<Vec<u32>>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, v) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:?}")?;
        }
        write!(f, "> in F{}^{}", self.p, self.ambient)
    }
}

/// Ordered by dimension, then by basis.
impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p, self.ambient, self.dim(), &self.basis).cmp(&(other.p, other.ambient, other.dim(), &other.basis))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Subspace {
    pub fn span(p: u32, ambient: usize, vectors: &[Vec<u32>]) -> Result<Self> {
        check_prime(p)?;
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::Structural(format!("vector {v:?} is not in F{p}^{ambient}")));
        }
        let mut rows: Vec<Vec<u32>> = vectors.iter().map(|v| v.iter().map(|x| x % p).collect()).collect();
        rref(&mut rows, p);
        Ok(Subspace { p, ambient, basis: rows })
    }

    pub fn zero(p: u32, ambient: usize) -> Result<Self> {
        Subspace::span(p, ambient, &[])
    }

    pub fn whole(p: u32, ambient: usize) -> Result<Self> {
        let id = FpMatrix::identity(p, ambient)?;
        let rows: Vec<Vec<u32>> = id.data.chunks(ambient.max(1)).map(|r| r.to_vec()).collect();
        Subspace::span(p, ambient, if ambient == 0 { &[] } else { &rows })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    fn compatible(&self, other: &Subspace) -> Result<()> {
        if self.p != other.p || self.ambient != other.ambient {
            return Err(Error::Structural(format!(
                "subspaces of F{}^{} and F{}^{} cannot be combined",
                self.p, self.ambient, other.p, other.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(self.p, self.ambient, &rows)
    }

    /// `U ∩ W` from the left kernel of the stacked bases: every relation
    /// `xU + yW = 0` yields the common vector `xU`.
    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        let (k, m, d, p) = (self.dim(), other.dim(), self.ambient, self.p);
        if k == 0 || m == 0 {
            return Subspace::zero(p, d);
        }
        let n = k + m;
        let mut rows: Vec<Vec<u32>> = self
            .basis
            .iter()
            .chain(other.basis.iter())
            .enumerate()
            .map(|(i, v)| {
                let mut row = v.clone();
                row.extend((0..n).map(|j| u32::from(i == j)));
                row
            })
            .collect();
        rref(&mut rows, p);
        let mut common = Vec::new();
        for row in rows.iter().filter(|r| r[..d].iter().all(|&x| x == 0)) {
            let x = &row[d..d + k];
            let v: Vec<u32> = (0..d)
                .map(|c| (0..k).fold(0, |acc, i| (acc + x[i] * self.basis[i][c]) % p))
                .collect();
            common.push(v);
        }
        Subspace::span(p, d, &common)
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.iter().map(|x| x % self.p).collect());
        rref(&mut rows, self.p);
        rows.len() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.p == other.p && self.ambient == other.ambient && self.basis.iter().all(|v| other.contains(v))
    }

    /// Image under a `d × d` matrix acting on column vectors.
    pub fn image(&self, m: &FpMatrix) -> Result<Subspace> {
        if m.p != self.p || m.cols != self.ambient || m.rows != self.ambient {
            return Err(Error::Structural("matrix does not act on this space".into()));
        }
        let rows: Vec<Vec<u32>> = self.basis.iter().map(|v| m.apply(v)).collect();
        Subspace::span(self.p, self.ambient, &rows)
    }
}

/// Number of `k`-dimensional subspaces of `F_p^d`.
pub fn gaussian_binomial(d: usize, k: usize, p: u64) -> u64 {
    if k > d {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= (p as u128).pow((d - i) as u32) - 1;
        den *= (p as u128).pow((i + 1) as u32) - 1;
    }
    (num / den) as u64
}

/// Every subspace of `F_p^d`, ordered by dimension and then basis.
pub fn enumerate_subspaces(p: u32, d: usize, caps: &Caps) -> Result<Vec<Subspace>> {
    check_prime(p)?;
    let total: u64 = (0..=d).map(|k| gaussian_binomial(d, k, p as u64)).sum();
    if total > caps.subspace_count as u64 {
        return Err(Error::capacity("subspace_count", caps.subspace_count, total));
    }
    let mut out = Vec::with_capacity(total as usize);
    for k in 0..=d {
        for pivots in combinations(d, k) {
            // Free entries: row i, column j > pivots[i] not a pivot column.
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| ((pivots[i] + 1)..d).filter(|j| !pivots.contains(j)).map(move |j| (i, j)))
                .collect();
            let count = (p as u64).pow(free.len() as u32);
            for code in 0..count {
                let mut rows = vec![vec![0u32; d]; k];
                for (i, &c) in pivots.iter().enumerate() {
                    rows[i][c] = 1;
                }
                let mut c = code;
                for &(i, j) in &free {
                    rows[i][j] = (c % p as u64) as u32;
                    c /= p as u64;
                }
                out.push(Subspace { p, ambient: d, basis: rows });
            }
        }
    }
    out.sort();
    if out.len() as u64 != total {
        return Err(Error::Invariant(format!("enumerated {} subspaces, expected {total}", out.len())));
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subspace_counts() {
        let caps = Caps::default();
        assert_eq!(enumerate_subspaces(2, 2, &caps).unwrap().len(), 5);
        assert_eq!(enumerate_subspaces(2, 4, &caps).unwrap().len(), 67);
        assert_eq!(enumerate_subspaces(3, 2, &caps).unwrap().len(), 6);
        let small = Caps { subspace_count: 10, ..Caps::default() };
        assert!(matches!(enumerate_subspaces(2, 4, &small), Err(Error::Capacity { .. })));
    }

    #[test]
    fn enumeration_is_canonical_and_distinct() {
        let all = enumerate_subspaces(3, 3, &Caps::default()).unwrap();
        for s in &all {
            assert_eq!(&Subspace::span(3, 3, s.basis()).unwrap(), s);
        }
        let mut dedup = all.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
    }

    #[test]
    fn sums_and_intersections() {
        let u = Subspace::span(2, 2, &[vec![1, 0]]).unwrap();
        let w = Subspace::span(2, 2, &[vec![0, 1]]).unwrap();
        assert_eq!(u.sum(&w).unwrap(), Subspace::whole(2, 2).unwrap());
        assert!(u.intersection(&w).unwrap().is_zero());
        assert_eq!(u.sum(&u).unwrap(), u);
        assert_eq!(u.intersection(&u).unwrap(), u);
        let x = Subspace::span(3, 2, &[vec![1, 0]]).unwrap();
        assert!(matches!(u.sum(&x), Err(Error::Structural(_))));
    }

    #[test]
    fn grassmann_in_f3_4() {
        let caps = Caps::default();
        let all = enumerate_subspaces(3, 4, &caps).unwrap();
        for (i, u) in all.iter().enumerate().step_by(7) {
            for w in all.iter().skip(i % 5).step_by(11) {
                let s = u.sum(w).unwrap();
                let t = u.intersection(w).unwrap();
                assert_eq!(s.dim() + t.dim(), u.dim() + w.dim());
                assert!(t.is_subspace_of(u) && t.is_subspace_of(w));
                assert!(u.is_subspace_of(&s) && w.is_subspace_of(&s));
            }
        }
    }

    #[test]
    fn matrices() {
        let m = FpMatrix::from_rows(5, &[vec![1, 2], vec![3, 4]]).unwrap();
        let id = FpMatrix::identity(5, 2).unwrap();
        assert_eq!(m.mul(&id).unwrap(), m);
        assert!(m.is_invertible());
        let sing = FpMatrix::from_rows(5, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(!sing.is_invertible());
        assert_eq!(m.apply(&[1, 1]), vec![3, 2]);
        assert!(FpMatrix::new(4, 1, 1, vec![1]).is_err());
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(2, 1, 2), 3);
        assert_eq!(gaussian_binomial(3, 0, 7), 1);
    }
}
