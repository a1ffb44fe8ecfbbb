//! Dense matrices over a prime field `F_p`.
//!
//! Vectors are rows and maps act on the right: a matrix `M` with `r` rows
//! and `c` columns is the map `F_p^r -> F_p^c`, `x ↦ xM`. Accordingly
//! [`FpMatrix::kernel`] is the left null space `{x : xM = 0}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpMatrix {
    pub rows: usize,
    pub cols: usize,
    pub p: u32,
    /// Row-major.
    pub entries: Vec<u32>,
}

pub fn inv_mod(a: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

impl FpMatrix {
    pub fn zero(rows: usize, cols: usize, p: u32) -> Self {
        FpMatrix { rows, cols, p, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, p: u32) -> Self {
        let mut m = Self::zero(n, n, p);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>], cols: usize, p: u32) -> Result<Self> {
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(FpMatrix { rows: rows.len(), cols, p, entries: rows.iter().flatten().map(|&x| x % p).collect() })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.cols + j] = v % self.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.rows || self.p != other.p {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let p = self.p as u64;
        let mut out = FpMatrix::zero(self.rows, other.cols, self.p);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] = ((out.entries[idx] as u64 + a * other.get(l, j) as u64) % p) as u32;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.rows);
        let p = self.p as u64;
        let mut out = vec![0u64; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += xi as u64 * self.get(i, j) as u64;
            }
        }
        out.into_iter().map(|v| (v % p) as u32).collect()
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zero(self.cols, self.rows, self.p);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = self.p as u64;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else { continue };
            if piv != r {
                for j in 0..m.cols {
                    m.entries.swap(piv * m.cols + j, r * m.cols + j);
                }
            }
            let inv = inv_mod(m.get(r, c), m.p) as u64;
            for j in c..m.cols {
                let v = (m.get(r, j) as u64 * inv % p) as u32;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c) as u64;
                if f == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = (m.get(i, j) as u64 + (p - f) * m.get(r, j) as u64) % p;
                    m.entries[i * m.cols + j] = v as u32;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : xM = 0}`, in reduced echelon form.
    pub fn kernel(&self) -> FpMatrix {
        let basis = right_null_space(&self.transpose());
        let m = FpMatrix { rows: basis.len(), cols: self.rows, p: self.p, entries: basis.concat() };
        echelon_basis(&m)
    }

    /// Some `x` with `xM = target`, if one exists.
    pub fn solve(&self, target: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(target.len(), self.cols);
        // Solve M^T x^T = target^T via the augmented matrix.
        let t = self.transpose();
        let mut aug = FpMatrix::zero(t.rows, t.cols + 1, self.p);
        for i in 0..t.rows {
            for j in 0..t.cols {
                aug.set(i, j, t.get(i, j));
            }
            aug.set(i, t.cols, target[i]);
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&t.cols) {
            return None;
        }
        let mut x = vec![0u32; t.cols];
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = r.get(row, t.cols);
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<FpMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = FpMatrix::zero(n, 2 * n, self.p);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = FpMatrix::zero(n, n, self.p);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

/// Nonzero rows of the reduced echelon form of `m`.
pub fn echelon_basis(m: &FpMatrix) -> FpMatrix {
    let (r, pivots) = m.rref();
    FpMatrix { rows: pivots.len(), cols: m.cols, p: m.p, entries: r.entries[..pivots.len() * m.cols].to_vec() }
}

/// Basis of `{x : M x^T = 0}` read off the reduced echelon form.
pub fn right_null_space(m: &FpMatrix) -> Vec<Vec<u32>> {
    let (r, pivots) = m.rref();
    let p = m.p;
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; m.cols];
        v[free] = 1;
        for (row, &c) in pivots.iter().enumerate() {
            v[c] = (p - r.get(row, free)) % p;
        }
        out.push(v);
    }
    out
}

/// Incremental row-echelon accumulator over `F_p`. Rows are reduced as they
/// arrive, so the stored system never exceeds the number of columns.
pub struct EchelonBuilder {
    p: u32,
    cols: usize,
    rows: Vec<Vec<u32>>,
    // pivot column of each stored row; rows are normalized at the pivot
    pivots: Vec<usize>,
    pivot_of_col: Vec<Option<usize>>,
}

impl EchelonBuilder {
    pub fn new(cols: usize, p: u32) -> Self {
        EchelonBuilder { p, cols, rows: Vec::new(), pivots: Vec::new(), pivot_of_col: vec![None; cols] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows; stores it if independent.
    /// Returns whether the rank grew.
    pub fn insert(&mut self, mut v: Vec<u32>) -> bool {
        let p = self.p as u64;
        for c in 0..self.cols {
            if v[c] == 0 {
                continue;
            }
            match self.pivot_of_col[c] {
                Some(r) => {
                    let f = v[c] as u64;
                    let row = &self.rows[r];
                    for j in c..self.cols {
                        if row[j] != 0 {
                            v[j] = ((v[j] as u64 + (p - f) * row[j] as u64) % p) as u32;
                        }
                    }
                }
                None => {
                    let inv = inv_mod(v[c], self.p) as u64;
                    for x in v[c..].iter_mut() {
                        *x = (*x as u64 * inv % p) as u32;
                    }
                    self.pivot_of_col[c] = Some(self.rows.len());
                    self.pivots.push(c);
                    self.rows.push(v);
                    return true;
                }
            }
        }
        false
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut probe = EchelonBuilder {
            p: self.p,
            cols: self.cols,
            rows: self.rows.clone(),
            pivots: self.pivots.clone(),
            pivot_of_col: self.pivot_of_col.clone(),
        };
        !probe.insert(v.to_vec())
    }

    pub fn into_matrix(self) -> FpMatrix {
        FpMatrix { rows: self.rows.len(), cols: self.cols, p: self.p, entries: self.rows.concat() }
    }
}

pub fn span_equal(a: &FpMatrix, b: &FpMatrix) -> bool {
    a.cols == b.cols && echelon_basis(a) == echelon_basis(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_map_kernel_is_everything() {
        let z = FpMatrix::zero(15, 4, 2);
        assert_eq!(z.kernel().rows, 15);
    }

    #[test]
    fn identity_kernel_is_trivial() {
        assert_eq!(FpMatrix::identity(7, 5).kernel().rows, 0);
    }

    #[test]
    fn solve_and_inconsistent_system() {
        let m = FpMatrix::from_rows(&[vec![1, 2], vec![2, 4]], 2, 5).unwrap();
        // rows are dependent; image is the line spanned by (1, 2)
        let x = m.solve(&[3, 1]).unwrap();
        assert_eq!(m.apply(&x), vec![3, 1]);
        assert!(m.solve(&[1, 0]).is_none());
    }

    #[test]
    fn echelon_builder_tracks_rank() {
        let mut b = EchelonBuilder::new(3, 3);
        assert!(b.insert(vec![1, 2, 0]));
        assert!(!b.insert(vec![2, 1, 0]));
        assert!(b.insert(vec![0, 0, 1]));
        assert!(b.contains(&[1, 2, 2]));
        assert!(!b.contains(&[0, 1, 0]));
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn inverse_of_singular_and_invertible() {
        assert!(FpMatrix::from_rows(&[vec![1, 2], vec![2, 4]], 2, 5).unwrap().inverse().is_none());
        let m = FpMatrix::from_rows(&[vec![1, 2], vec![3, 4]], 2, 5).unwrap();
        assert_eq!(m.mul(&m.inverse().unwrap()).unwrap(), FpMatrix::identity(2, 5));
    }

    fn mat(rows: usize, cols: usize, p: u32) -> impl Strategy<Value = FpMatrix> {
        proptest::collection::vec(0..p, rows * cols).prop_map(move |entries| FpMatrix { rows, cols, p, entries })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in mat(7, 5, 3)) {
            let k = m.kernel();
            prop_assert_eq!(m.rank() + k.rows, m.rows);
            for i in 0..k.rows {
                prop_assert!(m.apply(k.row(i)).iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn solve_finds_preimages(m in mat(4, 6, 5), x in proptest::collection::vec(0u32..5, 4)) {
            let t = m.apply(&x);
            let y = m.solve(&t).unwrap();
            prop_assert_eq!(m.apply(&y), t);
        }
    }
}
