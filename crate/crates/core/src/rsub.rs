//! The subgroup `R ≤ N_k` with `R ≅ V` as `Q`-modules and `RQ ≅ P`.
//!
//! Pick `u ∈ T` of order `p` centralised by `φ(Q_1)`, where `Q_1` fixes
//! `z_1 = (0,1)`. Its translates `u_x = u^{φ(g_x)}` (with `z_1 g_x = x`)
//! placed in coordinate `x` span an elementary abelian group `W ≤ N_k`
//! which `Q` permutes like the permutation module on nonzero vectors.
//! `R` is the image of an injective module map `V -> W`.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catalog::{AffineElement, Catalog, Matrix2, Vector};
use crate::error::{Error, Result};
use crate::fpmat::{span_equal, EchelonBuilder, FpMatrix};
use crate::module::{orthocomplement, perp, permutation_module, submodule_copy_of, ModuleAction};
use crate::perm::{orbit_words, PermGroup, Permutation};
use crate::report::Outcome;
use crate::wreath::{perm_to_u16, NTuple, TwElement, Wreath};

/// Random `(g, x)` pairs used to test that the translates are well defined.
pub const TRANSLATE_SAMPLES: usize = 100;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RData {
    pub q: u32,
    pub p: u32,
    /// `u_x` for each nonzero vector, in vector order.
    pub u: Vec<Permutation>,
    /// `2m` vectors of length `k-1` over `F_p`: exponents of the `u_x`.
    pub r_basis: FpMatrix,
    /// Matrix of `ψ: V -> R` in the basis `1, x, …` of each coordinate of
    /// `V`; `ψ(v)` has exponent vector `coords(v)·psi`.
    pub psi: FpMatrix,
    /// Where `u_1` was found: `"phi(Q1)"` or `"T"`.
    pub u1_source: String,
}

/// Natural `F_pQ`-module `V = F_q^2` of dimension `2m`.
pub fn natural_module(cat: &Catalog) -> ModuleAction {
    let dim = 2 * cat.m() as usize;
    let p = cat.p();
    let basis: Vec<Vector> = (0..dim)
        .map(|j| {
            let mut e = vec![0u32; dim];
            e[j] = 1;
            cat.vec_from_coords(&e)
        })
        .collect();
    let gens = cat
        .q_gens
        .iter()
        .map(|m| {
            let rows: Vec<Vec<u32>> = basis.iter().map(|&b| cat.vec_coords(cat.vec_mat(b, m))).collect();
            FpMatrix::from_rows(&rows, dim, p).unwrap()
        })
        .collect();
    ModuleAction::new(p, dim, gens).expect("SL(2,q) acts invertibly")
}

/// `Q` generators as permutations of the `k-1` nonzero vectors.
pub fn q_gens_on_nonzero(cat: &Catalog) -> Vec<Permutation> {
    cat.q_gens
        .iter()
        .map(|m| Permutation::from_images(cat.matrix_perm(m).images()[..cat.k - 1].to_vec()).unwrap())
        .collect()
}

/// Permutation module `W` on nonzero vectors.
pub fn w_module(cat: &Catalog) -> ModuleAction {
    permutation_module(cat.p(), cat.k - 1, &q_gens_on_nonzero(cat)).unwrap()
}

/// First `u` of order `p` centralised by `φ` of every generator of `Q_1`.
/// Candidates come from `φ(Q_1)` in sorted order, then all of `T`.
pub fn find_u1(cat: &Catalog) -> Result<(Permutation, &'static str)> {
    let q1 = cat.q1()?;
    let imgs: Vec<Permutation> =
        q1.generators().iter().map(|g| cat.projective_perm(&cat.matrix_of_perm(g))).collect();
    let p = cat.p() as u64;
    let good = |u: &Permutation| u.order() == p && imgs.iter().all(|s| u.conjugate_by(s) == *u);
    let d = cat.t_degree();
    let local = PermGroup::new(d, imgs.clone())?.elements_sorted(1 << 20)?;
    if let Some(u) = local.into_iter().find(|u| good(u)) {
        return Ok((u, "phi(Q1)"));
    }
    cat.t_group
        .elements_sorted(1 << 20)?
        .into_iter()
        .find(|u| good(u))
        .map(|u| (u, "T"))
        .ok_or_else(|| Error::Construction {
            stage: "find_u1".into(),
            detail: format!("no element of order {p} in T is centralised by phi(Q1)"),
        })
}

fn word_matrix(cat: &Catalog, word: &[usize]) -> Matrix2 {
    word.iter().fold(Matrix2::IDENTITY, |acc, &i| cat.mat_mul(&acc, &cat.q_gens[i]))
}

/// `u_x = u^{φ(g_x)}` for a Schreier transversal `g_x`, checked on random
/// `(g, x)` pairs against `u^{φ(g)}` with `z_1 g = x`.
pub fn build_translates(cat: &Catalog, u: &Permutation, seed: u64) -> Result<Vec<Permutation>> {
    let gens = q_gens_on_nonzero(cat);
    let words = orbit_words(&gens, 0);
    if words.len() != cat.k - 1 {
        return Err(Error::Construction { stage: "build_translates".into(), detail: "Q is not transitive on nonzero vectors".into() });
    }
    let us: Vec<Permutation> = (0..cat.k - 1)
        .map(|x| u.conjugate_by(&cat.projective_perm(&word_matrix(cat, &words[&(x as u32)]))))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z1 = cat.vectors[0];
    for _ in 0..TRANSLATE_SAMPLES {
        let g = cat.random_matrix(&mut rng);
        let x = cat.index(cat.vec_mat(z1, &g));
        if u.conjugate_by(&cat.projective_perm(&g)) != us[x] {
            return Err(Error::Construction {
                stage: "build_translates".into(),
                detail: format!("translate at vector {:?} depends on the transversal", cat.vectors[x]),
            });
        }
    }
    Ok(us)
}

pub fn build_r(cat: &Catalog) -> Result<RData> {
    let (u, source) = find_u1(cat)?;
    let us = build_translates(cat, &u, crate::CONSTRUCTION_SEED)?;
    let v = natural_module(cat);
    let w = w_module(cat);
    let x = submodule_copy_of(&v, &w)?.ok_or_else(|| Error::Construction {
        stage: "build_R".into(),
        detail: "no injective module map from V into W".into(),
    })?;
    Ok(RData { q: cat.q, p: cat.p(), u: us, r_basis: x.clone(), psi: x, u1_source: source.into() })
}

impl RData {
    pub fn dim(&self) -> usize {
        self.r_basis.rows
    }

    /// Replaces the last basis vector by the first unit vector outside the
    /// span, breaking `Q`-invariance while keeping `|R| = q^2`.
    pub fn inject_fault(&mut self) {
        let n = self.r_basis.cols;
        let mut span = EchelonBuilder::new(n, self.p);
        for i in 0..self.r_basis.rows {
            span.insert(self.r_basis.row(i).to_vec());
        }
        let e = (0..n)
            .map(|i| {
                let mut e = vec![0u32; n];
                e[i] = 1;
                e
            })
            .find(|e| !span.contains(e))
            .expect("k-1 > 2m");
        let last = self.r_basis.rows - 1;
        for (j, &c) in e.iter().enumerate() {
            self.r_basis.set(last, j, c);
            self.psi.set(last, j, c);
        }
    }

    /// The tuple with coordinate `x` equal to `u_x^{c_x}`.
    pub fn tuple(&self, w: &Wreath, c: &[u32]) -> NTuple {
        let mut f = w.n_identity();
        for (x, &e) in c.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let pw = perm_to_u16(&self.u[x].pow(e as u64));
            f.0[x * w.d..(x + 1) * w.d].copy_from_slice(&pw);
        }
        f
    }

    pub fn psi_coords(&self, cat: &Catalog, v: Vector) -> Vec<u32> {
        self.psi.apply(&cat.vec_coords(v))
    }

    pub fn psi(&self, w: &Wreath, v: Vector) -> NTuple {
        self.tuple(w, &self.psi_coords(w.cat, v))
    }

    /// `ψ(v)` for every `v ∈ V`, in vector order.
    pub fn elements(&self, w: &Wreath) -> Vec<NTuple> {
        w.cat.vectors.iter().map(|&v| self.psi(w, v)).collect()
    }

    pub fn basis_tuples(&self, w: &Wreath) -> Vec<NTuple> {
        (0..self.r_basis.rows).map(|i| self.tuple(w, self.r_basis.row(i))).collect()
    }

    /// `θ(τ(v)·M) = ψ(v)·M`.
    pub fn theta(&self, w: &Wreath, g: &AffineElement) -> TwElement {
        let (t, m) = w.cat.decompose(g);
        TwElement { f: self.psi(w, t.v), p: AffineElement::linear(m) }
    }
}

pub fn check_u_order(cat: &Catalog, r: &RData) -> Outcome {
    let p = cat.p() as u64;
    let bad = r.u.iter().position(|u| u.order() != p);
    Outcome::new(bad.is_none() && r.u.len() == cat.k - 1, json!({ "count": r.u.len(), "order": p, "first_bad": bad }))
}

/// Basis tuples commute, have order dividing `p`, and span `q^2` elements.
pub fn check_elementary_abelian(w: &Wreath, r: &RData) -> Outcome {
    let b = r.basis_tuples(w);
    let mut ok = true;
    for i in 0..b.len() {
        let mut acc = w.n_identity();
        for _ in 0..r.p {
            acc = w.n_mul(&acc, &b[i]);
        }
        ok &= w.is_identity(&acc);
        for j in i + 1..b.len() {
            ok &= w.n_mul(&b[i], &b[j]) == w.n_mul(&b[j], &b[i]);
        }
    }
    let distinct: HashSet<NTuple> = r.elements(w).into_iter().collect();
    let order = distinct.len();
    let expected = (w.cat.q as usize).pow(2);
    Outcome::new(ok && order == expected && r.r_basis.rank() == r.dim(), json!({ "order": order, "expected": expected, "rank": r.r_basis.rank() }))
}

pub fn check_in_n_k(w: &Wreath, r: &RData) -> Outcome {
    let bad = r.basis_tuples(w).iter().position(|f| !w.in_n_k(f));
    Outcome::new(bad.is_none(), json!({ "first_bad_basis_vector": bad }))
}

/// Conjugating each basis tuple by each `Q` generator gives the tuple of
/// `r·B_g`, and `r·B_g` stays in the span.
pub fn check_normalised_by_q(w: &Wreath, r: &RData) -> Outcome {
    let wm = w_module(w.cat);
    let mut compatible = true;
    for (gi, m) in w.cat.q_gens.iter().enumerate() {
        for i in 0..r.dim() {
            let row = r.r_basis.row(i);
            let lhs = w.n_act(&r.tuple(w, row), &AffineElement::linear(*m));
            compatible &= lhs == r.tuple(w, &wm.gens[gi].apply(row));
        }
    }
    let invariant = wm.is_invariant(&r.r_basis);
    Outcome::new(compatible && invariant, json!({ "conjugation_compatible": compatible, "span_invariant": invariant }))
}

/// `ψ(x+y) = ψ(x)ψ(y)` for all pairs, `ψ(x·g) = ψ(x)^g` for all `x` and
/// `Q` generators, and `ψ` injective.
pub fn check_psi(w: &Wreath, r: &RData) -> Outcome {
    let cat = w.cat;
    let els = r.elements(w);
    let mut additive = w.is_identity(&els[cat.zero_index()]);
    for (i, &x) in cat.vectors.iter().enumerate() {
        for (j, &y) in cat.vectors.iter().enumerate() {
            additive &= els[cat.index(cat.vec_add(x, y))] == w.n_mul(&els[i], &els[j]);
        }
    }
    let mut equivariant = true;
    for m in &cat.q_gens {
        for (i, &x) in cat.vectors.iter().enumerate() {
            equivariant &= els[cat.index(cat.vec_mat(x, m))] == w.n_act(&els[i], &AffineElement::linear(*m));
        }
    }
    let injective = els.iter().collect::<HashSet<_>>().len() == cat.k;
    Outcome::new(
        additive && equivariant && injective,
        json!({ "additive_pairs": cat.k * cat.k, "additive": additive, "equivariant": equivariant, "injective": injective }),
    )
}

/// `θ: P -> RQ` respects products on all generator pairs and on seeded
/// random pairs; `|R|·|Q| = |P|`.
pub fn check_rq_iso_p(w: &Wreath, r: &RData, seed: u64, samples: usize) -> Outcome {
    let cat = w.cat;
    let hom = |a: &AffineElement, b: &AffineElement| {
        w.mul(&r.theta(w, a), &r.theta(w, b)) == r.theta(w, &cat.affine_mul(a, b))
    };
    let mut first_bad = None;
    'outer: for (i, a) in cat.p_gens.iter().enumerate() {
        for (j, b) in cat.p_gens.iter().enumerate() {
            if !hom(a, b) {
                first_bad = Some((i, j));
                break 'outer;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_ok = (0..samples).all(|_| hom(&cat.random_affine(&mut rng), &cat.random_affine(&mut rng)));
    let r_order = (cat.q as u128).pow(2);
    let orders = r_order * cat.q_group().order() == cat.p_group.order();
    Outcome::new(
        first_bad.is_none() && random_ok && orders,
        json!({
            "generator_pairs": cat.p_gens.len().pow(2),
            "first_failing_pair": first_bad,
            "random_pairs": samples,
            "random_ok": random_ok,
            "r_order": r_order.to_string(),
            "q_order": cat.q_group().order().to_string(),
            "p_order": cat.p_group.order().to_string(),
        }),
    )
}

/// Some basis element of `R` is moved by a translation generator or by an
/// element of `ker φ`, so `R` is not centralised by `V ker φ`.
pub fn check_not_centralised(w: &Wreath, r: &RData) -> Outcome {
    let cat = w.cat;
    let mut movers: Vec<AffineElement> = cat.p_gens.iter().filter(|g| g.m == Matrix2::IDENTITY).copied().collect();
    movers.extend(cat.kernel_phi.iter().map(|m| AffineElement::linear(*m)));
    for (i, f) in r.basis_tuples(w).iter().enumerate() {
        for g in &movers {
            if w.n_act(f, g) != *f {
                return Outcome::new(true, json!({ "basis_vector": i, "v": g.v, "m": g.m.0 }));
            }
        }
    }
    Outcome::new(false, json!({ "basis_vector": null }))
}

/// No nontrivial element of `R` is a constant tuple.
pub fn check_meets_diagonal_trivially(w: &Wreath, r: &RData) -> Outcome {
    let hits = r.elements(w).iter().filter(|f| !w.is_identity(f) && w.as_diagonal(f).is_some()).count();
    Outcome::new(hits == 0, json!({ "nontrivial_diagonal_elements": hits }))
}

/// `F: W -> V`, `e_x ↦ coords(x)`, and the annihilator of `ker F`.
#[derive(Clone, Debug, Serialize)]
pub struct PerpCrossCheck {
    pub dim: usize,
    pub f_equivariant: bool,
    pub invariant: bool,
    pub isomorphic_to_v: bool,
    /// `ker F` meets its orthogonal complement trivially.
    pub nondegenerate: bool,
    pub equals_constructed_span: bool,
}

impl PerpCrossCheck {
    pub fn passed(&self) -> bool {
        self.f_equivariant && self.invariant && self.isomorphic_to_v
    }
}

pub fn perp_cross_check(cat: &Catalog, r: &RData) -> Result<PerpCrossCheck> {
    let v = natural_module(cat);
    let wm = w_module(cat);
    let rows: Vec<Vec<u32>> = cat.vectors[..cat.k - 1].iter().map(|&x| cat.vec_coords(x)).collect();
    let f = FpMatrix::from_rows(&rows, v.dim, cat.p())?;
    let f_equivariant = wm.gens.iter().zip(&v.gens).all(|(a, b)| a.mul(&f).unwrap() == f.mul(b).unwrap());
    let ker = f.kernel();
    let s = perp(&ker);
    let invariant = wm.is_invariant(&s);
    let isomorphic_to_v = invariant
        && s.rows == v.dim
        && wm.restrict(&s).ok().and_then(|m| submodule_copy_of(&v, &m).ok().flatten()).is_some();
    let nondegenerate = orthocomplement(&ker, cat.k - 1).is_ok();
    Ok(PerpCrossCheck {
        dim: s.rows,
        f_equivariant,
        invariant,
        isomorphic_to_v: isomorphic_to_v && s.rows == 2 * cat.m() as usize,
        nondegenerate,
        equals_constructed_span: span_equal(&s, &r.r_basis),
    })
}

/// Random elements of `R`, for sampling.
pub fn random_r_element<R2: Rng + ?Sized>(w: &Wreath, r: &RData, rng: &mut R2) -> NTuple {
    let c: Vec<u32> = (0..r.dim()).map(|_| rng.gen_range(0..r.p)).collect();
    r.tuple(w, &r.r_basis.apply(&c))
}
