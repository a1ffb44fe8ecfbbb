//! `SL(5,2)` acting on the 31 nonzero vectors of `F_2^5`: the vector
//! stabilizer `H = 2^4:SL(4,2)` has trivial centre, and the module induced
//! from a 4-dimensional module of `H/O_2(H)` contains no copy of the
//! natural 5-dimensional module.
//!
//! `H` fixes `e_5` under `x ↦ xM`, so `M = [[A, b], [0, 1]]` and
//! `M ↦ A` is the quotient map. The 4-dimensional module is taken with
//! `A` acting as `(A⁻¹)ᵀ`; with `A` itself the restriction map
//! `(y, c) ↦ y` is `H`-equivariant and Frobenius reciprocity gives a copy
//! of the natural module, so both dimensions are reported.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpmat::FpMatrix;
use crate::module::{equivariant_hom_space, ModuleAction};
use crate::perm::{orbit_words, PermGroup, Permutation};

pub const DIM: usize = 5;
pub const POINTS: usize = 31;
pub const SL52_ORDER: u128 = 9_999_360;
pub const STABILIZER_ORDER: u128 = 322_560;

/// Rows of a 5x5 matrix over `F_2` as bit masks (bit `j` = column `j`).
type Mat5 = [u8; DIM];

#[derive(Clone, Debug, Serialize)]
pub struct RemarkReport {
    pub group_order: String,
    pub stabilizer_order: String,
    pub stabilizer_centre_order: usize,
    pub induced_dim: usize,
    /// Levi quotient acting through `(A⁻¹)ᵀ`.
    pub hom_dim: usize,
    /// Levi quotient acting through `A`.
    pub hom_dim_untwisted: usize,
}

impl RemarkReport {
    pub fn passed(&self) -> bool {
        self.group_order == SL52_ORDER.to_string()
            && self.stabilizer_order == STABILIZER_ORDER.to_string()
            && self.stabilizer_centre_order == 1
            && self.induced_dim == POINTS * 4
            && self.hom_dim == 0
    }
}

fn unit(i: usize, j: usize) -> Mat5 {
    let mut m: Mat5 = std::array::from_fn(|r| 1 << r);
    m[i] ^= 1 << j;
    m
}

fn vec_mul(x: u8, m: &Mat5) -> u8 {
    (0..DIM).filter(|&i| x >> i & 1 == 1).fold(0, |acc, i| acc ^ m[i])
}

fn mat_mul(a: &Mat5, b: &Mat5) -> Mat5 {
    std::array::from_fn(|i| vec_mul(a[i], b))
}

fn to_perm(m: &Mat5) -> Permutation {
    Permutation::from_images((1..=POINTS as u8).map(|x| vec_mul(x, m) as u32 - 1).collect()).unwrap()
}

fn of_perm(g: &Permutation) -> Mat5 {
    std::array::from_fn(|i| g.apply((1u32 << i) - 1) as u8 + 1)
}

fn to_fp(m: &Mat5) -> FpMatrix {
    let rows: Vec<Vec<u32>> = m.iter().map(|&r| (0..DIM).map(|j| (r >> j & 1) as u32).collect()).collect();
    FpMatrix::from_rows(&rows, DIM, 2).unwrap()
}

/// Transvections `I + E_{i,i+1}` and `I + E_{i+1,i}`.
pub fn sl52_generators() -> Vec<Mat5> {
    (0..DIM - 1).flat_map(|i| [unit(i, i + 1), unit(i + 1, i)]).collect()
}

/// Generators of the stabilizer of `e_5`: a Levi `SL(4,2)` and `I + E_{4,5}`.
fn stabilizer_generators() -> Vec<Mat5> {
    let mut g: Vec<Mat5> = (0..DIM - 2).flat_map(|i| [unit(i, i + 1), unit(i + 1, i)]).collect();
    g.push(unit(DIM - 2, DIM - 1));
    g
}

fn levi_block(m: &Mat5, twisted: bool) -> FpMatrix {
    let mut a = FpMatrix::zero(4, 4, 2);
    for i in 0..4 {
        for j in 0..4 {
            a.set(i, j, (m[i] >> j & 1) as u32);
        }
    }
    if twisted {
        a.inverse().expect("Levi block is invertible").transpose()
    } else {
        a
    }
}

fn stage(stage: &str, detail: String) -> Error {
    Error::Construction { stage: stage.into(), detail }
}

/// Induced module over the 31 cosets `H t_i`, `t_i` taking `e_5` to the
/// `i`-th nonzero vector: `(m ⊗ t_i)g = m·ρ(t_i g t_j⁻¹) ⊗ t_j`.
fn induced_module(gens: &[Mat5], twisted: bool) -> Result<ModuleAction> {
    let perms: Vec<Permutation> = gens.iter().map(to_perm).collect();
    let e5 = (1u32 << (DIM - 1)) - 1;
    let words = orbit_words(&perms, e5);
    if words.len() != POINTS {
        return Err(stage("transversal", format!("orbit of e5 has {} points", words.len())));
    }
    let ident: Mat5 = std::array::from_fn(|r| 1 << r);
    let transversal: Vec<Mat5> =
        (0..POINTS as u32).map(|x| words[&x].iter().fold(ident, |acc, &i| mat_mul(&acc, &gens[i]))).collect();
    let inverses: Vec<Mat5> = transversal.iter().map(|t| of_perm(&to_perm(t).inverse())).collect();
    let dim = POINTS * 4;
    let mats = gens
        .iter()
        .map(|g| {
            let mut big = FpMatrix::zero(dim, dim, 2);
            for i in 0..POINTS {
                let tg = mat_mul(&transversal[i], g);
                let j = vec_mul(1 << (DIM - 1), &tg) as usize - 1;
                let h = mat_mul(&tg, &inverses[j]);
                if h[DIM - 1] != 1 << (DIM - 1) {
                    return Err(stage("induction", "coset element does not fix e5".into()));
                }
                let blk = levi_block(&h, twisted);
                for r in 0..4 {
                    for c in 0..4 {
                        big.set(4 * i + r, 4 * j + c, blk.get(r, c));
                    }
                }
            }
            Ok(big)
        })
        .collect::<Result<Vec<_>>>()?;
    ModuleAction::new(2, dim, mats)
}

/// Elements of `H` commuting with `H`, from the commutant of `H` on `F_2^5`
/// (faithful, so the centre is the set of invertible commutant elements
/// fixing `e_5`).
fn stabilizer_centre_order(h: &[Mat5]) -> Result<usize> {
    let v = ModuleAction::new(2, DIM, h.iter().map(to_fp).collect())?;
    let basis = equivariant_hom_space(&v, &v)?;
    if basis.len() > 16 {
        return Err(stage("centre", format!("commutant of dimension {}", basis.len())));
    }
    let mut count = 0;
    for n in 1u32..(1 << basis.len()) {
        let mut x = FpMatrix::zero(DIM, DIM, 2);
        for (i, b) in basis.iter().enumerate() {
            if n >> i & 1 == 1 {
                for (e, be) in x.entries.iter_mut().zip(&b.entries) {
                    *e ^= be;
                }
            }
        }
        let fixes_e5 = x.row(DIM - 1) == [0, 0, 0, 0, 1];
        if fixes_e5 && x.is_invertible() {
            count += 1;
        }
    }
    Ok(count)
}

pub fn run() -> Result<RemarkReport> {
    let gens = sl52_generators();
    let q = PermGroup::new(POINTS, gens.iter().map(to_perm).collect())?;
    let hg = stabilizer_generators();
    let h = PermGroup::new(POINTS, hg.iter().map(to_perm).collect())?;
    let e5 = (1u32 << (DIM - 1)) - 1;
    if hg.iter().any(|m| to_perm(m).apply(e5) != e5) {
        return Err(stage("stabilizer", "generator moves e5".into()));
    }
    let v5 = ModuleAction::new(2, DIM, gens.iter().map(to_fp).collect())?;
    let w = induced_module(&gens, true)?;
    let w_plain = induced_module(&gens, false)?;
    Ok(RemarkReport {
        group_order: q.order().to_string(),
        stabilizer_order: h.order().to_string(),
        stabilizer_centre_order: stabilizer_centre_order(&hg)?,
        induced_dim: w.dim,
        hom_dim: equivariant_hom_space(&v5, &w)?.len(),
        hom_dim_untwisted: equivariant_hom_space(&v5, &w_plain)?.len(),
    })
}
