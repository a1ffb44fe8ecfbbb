//! Group modules over `F_p` given by one matrix per group generator, and
//! the equivariant-map computations the construction needs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpmat::{echelon_basis, right_null_space, EchelonBuilder, FpMatrix};
use crate::perm::Permutation;
use crate::CONSTRUCTION_SEED;

/// Largest unknown count accepted by [`equivariant_hom_space`].
pub const MAX_HOM_UNKNOWNS: usize = 4096;

/// Random combinations tried by [`submodule_copy_of`] before giving up.
pub const COPY_TRIALS: usize = 10_000;

#[derive(Clone, Debug, Serialize)]
pub struct ModuleAction {
    pub p: u32,
    pub dim: usize,
    /// Row-vector action `x ↦ x·A_g`, one per generator.
    pub gens: Vec<FpMatrix>,
}

impl ModuleAction {
    pub fn new(p: u32, dim: usize, gens: Vec<FpMatrix>) -> Result<Self> {
        for g in &gens {
            if g.rows != dim || g.cols != dim || g.p != p {
                return Err(Error::Shape(format!("generator is {}x{} over F_{}, expected {dim}x{dim} over F_{p}", g.rows, g.cols, g.p)));
            }
            if !g.is_invertible() {
                return Err(Error::Shape("generator matrix is singular".into()));
            }
        }
        Ok(ModuleAction { p, dim, gens })
    }

    /// Matrix of the word `g_{w0} g_{w1} …`.
    pub fn word(&self, word: &[usize]) -> FpMatrix {
        word.iter().fold(FpMatrix::identity(self.dim, self.p), |acc, &i| acc.mul(&self.gens[i]).unwrap())
    }

    /// The submodule spanned by the rows of `basis`, in that basis.
    pub fn restrict(&self, basis: &FpMatrix) -> Result<ModuleAction> {
        let d = basis.rows;
        let mut gens = Vec::with_capacity(self.gens.len());
        for g in &self.gens {
            let img = basis.mul(g)?;
            let mut m = FpMatrix::zero(d, d, self.p);
            for i in 0..d {
                let x = basis.solve(img.row(i)).ok_or_else(|| Error::Shape("subspace is not invariant".into()))?;
                for (j, v) in x.into_iter().enumerate() {
                    m.set(i, j, v);
                }
            }
            gens.push(m);
        }
        ModuleAction::new(self.p, d, gens)
    }

    /// Is the row span of `basis` invariant under every generator?
    pub fn is_invariant(&self, basis: &FpMatrix) -> bool {
        let mut span = EchelonBuilder::new(self.dim, self.p);
        for i in 0..basis.rows {
            span.insert(basis.row(i).to_vec());
        }
        self.gens.iter().all(|g| (0..basis.rows).all(|i| span.contains(&g.apply(basis.row(i)))))
    }
}

/// Permutation module: basis vector `e_i` goes to `e_{i^g}`.
pub fn permutation_module(p: u32, degree: usize, gens: &[Permutation]) -> Result<ModuleAction> {
    let mats = gens
        .iter()
        .map(|g| {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
            let mut m = FpMatrix::zero(degree, degree, p);
            for i in 0..degree {
                m.set(i, g.apply(i as u32) as usize, 1);
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    ModuleAction::new(p, degree, mats)
}

/// Basis of `Hom(A, B)`: all `X` with `A_g X = X B_g` for every generator.
///
/// Returned in reduced echelon form of the flattened matrices, so the basis
/// is deterministic.
pub fn equivariant_hom_space(a: &ModuleAction, b: &ModuleAction) -> Result<Vec<FpMatrix>> {
    if a.gens.len() != b.gens.len() || a.p != b.p {
        return Err(Error::Shape("modules for different generator lists".into()));
    }
    let (da, db, p) = (a.dim, b.dim, a.p);
    let unknowns = da * db;
    if unknowns > MAX_HOM_UNKNOWNS {
        return Err(Error::TooLarge(format!("hom space with {unknowns} unknowns exceeds {MAX_HOM_UNKNOWNS}")));
    }
    let mut system = EchelonBuilder::new(unknowns, p);
    for (ag, bg) in a.gens.iter().zip(&b.gens) {
        for i in 0..da {
            for j in 0..db {
                if system.rank() == unknowns {
                    break;
                }
                // (A X)_{ij} - (X B)_{ij}
                let mut row = vec![0u32; unknowns];
                for l in 0..da {
                    let c = ag.get(i, l);
                    if c != 0 {
                        row[l * db + j] = (row[l * db + j] + c) % p;
                    }
                }
                for l in 0..db {
                    let c = bg.get(l, j);
                    if c != 0 {
                        row[i * db + l] = (row[i * db + l] + p - c) % p;
                    }
                }
                system.insert(row);
            }
        }
    }
    let null = right_null_space(&system.into_matrix());
    if null.is_empty() {
        return Ok(Vec::new());
    }
    let stacked = FpMatrix { rows: null.len(), cols: unknowns, p, entries: null.concat() };
    let basis = echelon_basis(&stacked);
    Ok((0..basis.rows)
        .map(|r| FpMatrix { rows: da, cols: db, p, entries: basis.row(r).to_vec() })
        .collect())
}

fn combine(basis: &[FpMatrix], coeffs: &[u32]) -> FpMatrix {
    let p = basis[0].p;
    let mut out = FpMatrix::zero(basis[0].rows, basis[0].cols, p);
    for (b, &c) in basis.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.entries.iter_mut().zip(&b.entries) {
            *o = ((*o as u64 + c as u64 * x as u64) % p as u64) as u32;
        }
    }
    out
}

/// An injective module map `V -> W`, if one is found.
///
/// Search order: the echelon basis of `Hom(V, W)`, then up to
/// [`COPY_TRIALS`] seeded random combinations, then (when the hom space has
/// at most `2^16` elements) every combination in counting order.
pub fn submodule_copy_of(v: &ModuleAction, w: &ModuleAction) -> Result<Option<FpMatrix>> {
    let basis = equivariant_hom_space(v, w)?;
    if basis.is_empty() {
        return Ok(None);
    }
    let injective = |x: &FpMatrix| x.rank() == v.dim;
    if let Some(x) = basis.iter().find(|x| injective(x)) {
        return Ok(Some(x.clone()));
    }
    let p = v.p;
    let mut rng = ChaCha8Rng::seed_from_u64(CONSTRUCTION_SEED);
    for _ in 0..COPY_TRIALS {
        let coeffs: Vec<u32> = (0..basis.len()).map(|_| rng.gen_range(0..p)).collect();
        let x = combine(&basis, &coeffs);
        if injective(&x) {
            return Ok(Some(x));
        }
    }
    let size = (p as f64).powi(basis.len() as i32);
    if size <= 65536.0 {
        let total = (p as u64).pow(basis.len() as u32);
        for n in 1..total {
            let mut r = n;
            let coeffs: Vec<u32> = (0..basis.len())
                .map(|_| {
                    let c = (r % p as u64) as u32;
                    r /= p as u64;
                    c
                })
                .collect();
            let x = combine(&basis, &coeffs);
            if injective(&x) {
                return Ok(Some(x));
            }
        }
    }
    Ok(None)
}

/// Orthogonal complement under the standard dot product, without any
/// degeneracy check.
pub fn perp(s: &FpMatrix) -> FpMatrix {
    s.transpose().kernel()
}

/// Orthogonal complement of the row span of `s` in `F_p^dim`.
///
/// Fails with [`Error::Degenerate`] when the form is degenerate on the
/// span, i.e. the span meets its complement.
pub fn orthocomplement(s: &FpMatrix, dim: usize) -> Result<FpMatrix> {
    if s.cols != dim {
        return Err(Error::Shape(format!("basis has {} columns, ambient dimension {dim}", s.cols)));
    }
    if s.rows == 0 {
        return Ok(FpMatrix::identity(dim, s.p));
    }
    let comp = perp(s);
    let mut joint = EchelonBuilder::new(dim, s.p);
    for i in 0..s.rows {
        joint.insert(s.row(i).to_vec());
    }
    for i in 0..comp.rows {
        joint.insert(comp.row(i).to_vec());
    }
    let radical = s.rank() + comp.rows - joint.rank();
    if radical > 0 {
        return Err(Error::Degenerate(radical));
    }
    Ok(comp)
}
