//! Element arithmetic in `G = T twr_φ P`.
//!
//! The base group `N` consists of functions `f: P -> T` with
//! `f(hq) = f(h)^{φ(q)}`; such an `f` is determined by its values on the
//! left transversal, so it is stored as `k` permutations of the projective
//! line (an [`NTuple`]). Coordinate `x` holds the value on the coset
//! labelled by the vector `x` (see [`crate::catalog`]).
//!
//! `P` acts on `N` by `f^g(h) = f(gh)`. On coordinates: if `g·z_x = z_j·q`
//! then `f^g` has `f(z_j)^{φ(q)}` at `x`. Elements of `G` are kept in the
//! normal form `f·p` with `f ∈ N`, `p ∈ P`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{AffineElement, Catalog, Matrix2};
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// An element of `N`: `k` coordinates, each a permutation of `d = q+1`
/// points, flattened. Ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NTuple(pub Vec<u16>);

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TwElement {
    pub f: NTuple,
    pub p: AffineElement,
}

/// `f_t`: the element of the diagonal `N̂` with every coordinate `t`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiagonalElement {
    pub t: Permutation,
}

#[derive(Serialize, Deserialize)]
pub struct TwElementJson {
    pub f: Vec<Vec<u32>>,
    pub v: [u32; 2],
    pub m: [[u32; 2]; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct CHatReport {
    /// `f_t` is fixed by the translation generators.
    pub centralised_by_v: bool,
    /// `f_t` is fixed by `ker φ`.
    pub centralised_by_kernel: bool,
    /// `(f_t)^g = f_{t^{φ(g)}}` for the generators of `Q`.
    pub q_acts_via_phi: bool,
    /// Some generator of `Q` moves some `f_t`.
    pub q_acts_nontrivially: bool,
}

impl CHatReport {
    pub fn passed(&self) -> bool {
        self.centralised_by_v && self.centralised_by_kernel && self.q_acts_via_phi && self.q_acts_nontrivially
    }
}

#[inline]
fn compose_into(out: &mut [u16], a: &[u16], b: &[u16]) {
    for (o, &x) in out.iter_mut().zip(a) {
        *o = b[x as usize];
    }
}

/// `s⁻¹ t s` for permutations stored as images.
#[inline]
fn conj_into(out: &mut [u16], t: &[u16], s: &[u16]) {
    for (x, &tx) in t.iter().enumerate() {
        out[s[x] as usize] = s[tx as usize];
    }
}

pub fn perm_to_u16(p: &Permutation) -> Vec<u16> {
    p.images().iter().map(|&x| x as u16).collect()
}

pub fn u16_to_perm(v: &[u16]) -> Permutation {
    Permutation::from_images(v.iter().map(|&x| x as u32).collect()).expect("coordinate is a permutation")
}

/// Arithmetic context for one catalog.
pub struct Wreath<'c> {
    pub cat: &'c Catalog,
    pub k: usize,
    /// Degree of `T`.
    pub d: usize,
}

impl<'c> Wreath<'c> {
    pub fn new(cat: &'c Catalog) -> Self {
        Wreath { cat, k: cat.k, d: cat.t_degree() }
    }

    pub fn coord<'a>(&self, f: &'a NTuple, i: usize) -> &'a [u16] {
        &f.0[i * self.d..(i + 1) * self.d]
    }

    pub fn n_identity(&self) -> NTuple {
        let id: Vec<u16> = (0..self.d as u16).collect();
        NTuple(id.repeat(self.k))
    }

    pub fn is_identity(&self, f: &NTuple) -> bool {
        f.0.chunks(self.d).all(|c| c.iter().enumerate().all(|(i, &x)| i as u16 == x))
    }

    pub fn coord_is_identity(&self, f: &NTuple, i: usize) -> bool {
        self.coord(f, i).iter().enumerate().all(|(j, &x)| j as u16 == x)
    }

    /// Tuple from one permutation per coordinate.
    pub fn n_from_perms(&self, perms: &[Permutation]) -> Result<NTuple> {
        if perms.len() != self.k || perms.iter().any(|p| p.degree() != self.d) {
            return Err(Error::Shape(format!("expected {} permutations of degree {}", self.k, self.d)));
        }
        Ok(NTuple(perms.iter().flat_map(perm_to_u16).collect()))
    }

    pub fn n_to_perms(&self, f: &NTuple) -> Vec<Permutation> {
        f.0.chunks(self.d).map(u16_to_perm).collect()
    }

    /// Tuple that is `t` at coordinate `i` and trivial elsewhere.
    pub fn n_single(&self, i: usize, t: &Permutation) -> NTuple {
        let mut f = self.n_identity();
        f.0[i * self.d..(i + 1) * self.d].copy_from_slice(&perm_to_u16(t));
        f
    }

    pub fn n_mul(&self, a: &NTuple, b: &NTuple) -> NTuple {
        let mut out = vec![0u16; a.0.len()];
        for ((o, x), y) in out.chunks_mut(self.d).zip(a.0.chunks(self.d)).zip(b.0.chunks(self.d)) {
            compose_into(o, x, y);
        }
        NTuple(out)
    }

    pub fn n_inv(&self, a: &NTuple) -> NTuple {
        let mut out = vec![0u16; a.0.len()];
        for (o, x) in out.chunks_mut(self.d).zip(a.0.chunks(self.d)) {
            for (i, &y) in x.iter().enumerate() {
                o[y as usize] = i as u16;
            }
        }
        NTuple(out)
    }

    /// `g·z_i = z_j·q`: returns `(j, q)`.
    pub fn transversal_step(&self, g: &AffineElement, i: usize) -> (usize, Matrix2) {
        let gz = self.cat.affine_mul(g, &self.cat.transversal_element(i));
        let j = self.cat.coset_index(&gz);
        let (_, q) = self.cat.decompose(&gz);
        (j, q)
    }

    /// `f^g` for `g ∈ P`.
    pub fn n_act(&self, f: &NTuple, g: &AffineElement) -> NTuple {
        let mut out = vec![0u16; f.0.len()];
        let mut cached: Option<(Matrix2, Vec<u16>)> = None;
        for i in 0..self.k {
            let (j, q) = self.transversal_step(g, i);
            let s = match &cached {
                Some((m, s)) if *m == q => s,
                _ => {
                    cached = Some((q, perm_to_u16(&self.cat.projective_perm(&q))));
                    &cached.as_ref().unwrap().1
                }
            };
            conj_into(&mut out[i * self.d..(i + 1) * self.d], self.coord(f, j), s);
        }
        NTuple(out)
    }

    pub fn identity(&self) -> TwElement {
        TwElement { f: self.n_identity(), p: AffineElement::IDENTITY }
    }

    pub fn embed_n(&self, f: NTuple) -> TwElement {
        TwElement { f, p: AffineElement::IDENTITY }
    }

    pub fn embed_p(&self, p: AffineElement) -> TwElement {
        TwElement { f: self.n_identity(), p }
    }

    pub fn normal_form<'a>(&self, g: &'a TwElement) -> (&'a NTuple, &'a AffineElement) {
        (&g.f, &g.p)
    }

    /// `(f1 p1)(f2 p2) = f1 · f2^{p1⁻¹} · p1 p2`.
    pub fn mul(&self, a: &TwElement, b: &TwElement) -> TwElement {
        let f2 = if b.f == self.n_identity() { b.f.clone() } else { self.n_act(&b.f, &self.cat.affine_inv(&a.p)) };
        TwElement { f: self.n_mul(&a.f, &f2), p: self.cat.affine_mul(&a.p, &b.p) }
    }

    pub fn inv(&self, a: &TwElement) -> TwElement {
        TwElement { f: self.n_act(&self.n_inv(&a.f), &a.p), p: self.cat.affine_inv(&a.p) }
    }

    /// `g⁻¹ x g`.
    pub fn conj(&self, x: &TwElement, g: &TwElement) -> TwElement {
        self.mul(&self.mul(&self.inv(g), x), g)
    }

    pub fn random_n<R: Rng + ?Sized>(&self, rng: &mut R) -> NTuple {
        let perms: Vec<Permutation> = (0..self.k).map(|_| self.cat.t_group.random_element(rng)).collect();
        self.n_from_perms(&perms).unwrap()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> TwElement {
        TwElement { f: self.random_n(rng), p: self.cat.random_affine(rng) }
    }

    /// Every coordinate lies in `T`.
    pub fn is_valid(&self, f: &NTuple) -> bool {
        f.0.len() == self.k * self.d
            && f.0.chunks(self.d).all(|c| {
                Permutation::from_images(c.iter().map(|&x| x as u32).collect())
                    .map(|p| self.cat.t_group.contains(&p))
                    .unwrap_or(false)
            })
    }

    /// Is `f` in `T_i` (trivial at every coordinate other than `i`)?
    pub fn in_t_i(&self, f: &NTuple, i: usize) -> bool {
        (0..self.k).filter(|&j| j != i).all(|j| self.coord_is_identity(f, j))
    }

    /// Is `f` in `N_k` (trivial at the zero-vector coordinate)?
    pub fn in_n_k(&self, f: &NTuple) -> bool {
        self.coord_is_identity(f, self.cat.zero_index())
    }

    pub fn c_hat(&self, t: &Permutation) -> DiagonalElement {
        DiagonalElement { t: t.clone() }
    }

    pub fn expand(&self, d: &DiagonalElement) -> NTuple {
        NTuple(perm_to_u16(&d.t).repeat(self.k))
    }

    /// `Some(t)` if `f` is constant with value `t`.
    pub fn as_diagonal(&self, f: &NTuple) -> Option<DiagonalElement> {
        let first = self.coord(f, 0);
        f.0.chunks(self.d).all(|c| c == first).then(|| DiagonalElement { t: u16_to_perm(first) })
    }

    pub fn verify_c_hat(&self) -> CHatReport {
        let cat = self.cat;
        let ts: Vec<&Permutation> = cat.t_group.generators().iter().collect();
        let fixes = |g: &AffineElement| {
            ts.iter().all(|t| {
                let f = self.expand(&self.c_hat(t));
                self.n_act(&f, g) == f
            })
        };
        let centralised_by_v = cat.p_gens.iter().filter(|g| g.m == Matrix2::IDENTITY).all(fixes);
        let centralised_by_kernel = cat.kernel_phi.iter().all(|m| fixes(&AffineElement::linear(*m)));
        let mut q_acts_via_phi = true;
        let mut q_acts_nontrivially = false;
        for m in &cat.q_gens {
            let s = cat.projective_perm(m);
            for t in &ts {
                let f = self.expand(&self.c_hat(t));
                let img = self.n_act(&f, &AffineElement::linear(*m));
                q_acts_via_phi &= img == self.expand(&self.c_hat(&t.conjugate_by(&s)));
                q_acts_nontrivially |= img != f;
            }
        }
        CHatReport { centralised_by_v, centralised_by_kernel, q_acts_via_phi, q_acts_nontrivially }
    }

    /// The permutation `i ↦ j` of factor indices with `(T_i)^g = T_j`.
    pub fn conjugation_action_on_factors(&self, g: &TwElement) -> Permutation {
        let mut images = vec![0u32; self.k];
        for x in 0..self.k {
            let (j, _) = self.transversal_step(&g.p, x);
            images[j] = x as u32;
        }
        Permutation::from_images(images).expect("factor action is a bijection")
    }

    pub fn to_json(&self, g: &TwElement) -> TwElementJson {
        TwElementJson {
            f: g.f.0.chunks(self.d).map(|c| c.iter().map(|&x| x as u32).collect()).collect(),
            v: g.p.v,
            m: g.p.m.0,
        }
    }

    pub fn from_json(&self, j: &TwElementJson) -> Result<TwElement> {
        let perms = j.f.iter().cloned().map(Permutation::from_images).collect::<Result<Vec<_>>>()?;
        let f = self.n_from_perms(&perms)?;
        let q = self.cat.q;
        if j.v.iter().chain(j.m.iter().flatten()).any(|&x| x >= q) {
            return Err(Error::Shape("field element out of range".into()));
        }
        let p = AffineElement { v: j.v, m: Matrix2(j.m) };
        if self.cat.det(&p.m) != 1 {
            return Err(Error::Shape("matrix is not in SL(2,q)".into()));
        }
        Ok(TwElement { f, p })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_laws() {
        let cat = Catalog::from_q(4).unwrap();
        let w = Wreath::new(&cat);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = w.random(&mut rng);
            assert_eq!(w.mul(&x, &w.identity()), x);
            assert_eq!(w.mul(&w.identity(), &x), x);
            assert_eq!(w.mul(&x, &w.inv(&x)), w.identity());
            assert!(w.is_valid(&x.f));
        }
    }

    #[test]
    fn associativity_randomized() {
        for q in [4u64, 5] {
            let cat = Catalog::from_q(q).unwrap();
            let w = Wreath::new(&cat);
            let mut rng = ChaCha8Rng::seed_from_u64(q);
            for _ in 0..500 {
                let (a, b, c) = (w.random(&mut rng), w.random(&mut rng), w.random(&mut rng));
                assert_eq!(w.mul(&w.mul(&a, &b), &c), w.mul(&a, &w.mul(&b, &c)));
            }
        }
    }

    #[test]
    fn p_action_is_a_right_action() {
        let cat = Catalog::from_q(5).unwrap();
        let w = Wreath::new(&cat);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let f = w.random_n(&mut rng);
            let (g, h) = (cat.random_affine(&mut rng), cat.random_affine(&mut rng));
            assert_eq!(w.n_act(&w.n_act(&f, &g), &h), w.n_act(&f, &cat.affine_mul(&g, &h)));
            let f2 = w.random_n(&mut rng);
            assert_eq!(w.n_act(&w.n_mul(&f, &f2), &g), w.n_mul(&w.n_act(&f, &g), &w.n_act(&f2, &g)));
        }
    }

    #[test]
    fn normal_form_and_embeddings() {
        let cat = Catalog::from_q(5).unwrap();
        let w = Wreath::new(&cat);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let f = w.random_n(&mut rng);
            let p = cat.random_affine(&mut rng);
            let ep = w.embed_p(p);
            assert_eq!(w.normal_form(&ep), (&w.n_identity(), &p));
            let g = w.mul(&w.embed_n(f.clone()), &ep);
            assert_eq!(w.normal_form(&g), (&f, &p));
            let p2 = cat.random_affine(&mut rng);
            assert_eq!(w.mul(&ep, &w.embed_p(p2)), w.embed_p(cat.affine_mul(&p, &p2)));
            let f2 = w.random_n(&mut rng);
            assert_eq!(w.mul(&w.embed_n(f.clone()), &w.embed_n(f2.clone())), w.embed_n(w.n_mul(&f, &f2)));
        }
    }

    #[test]
    fn conjugation_by_p_is_the_twisting_rule() {
        let cat = Catalog::from_q(4).unwrap();
        let w = Wreath::new(&cat);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let f = w.random_n(&mut rng);
            let p = cat.random_affine(&mut rng);
            let c = w.conj(&w.embed_n(f.clone()), &w.embed_p(p));
            assert_eq!(c, w.embed_n(w.n_act(&f, &p)));
        }
    }

    #[test]
    fn n_is_normal() {
        let cat = Catalog::from_q(5).unwrap();
        let w = Wreath::new(&cat);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let n = w.embed_n(w.random_n(&mut rng));
            let g = w.random(&mut rng);
            assert_eq!(w.conj(&n, &g).p, AffineElement::IDENTITY);
        }
    }

    #[test]
    fn stabilizer_of_a_coordinate_acts_by_phi() {
        let cat = Catalog::from_q(4).unwrap();
        let w = Wreath::new(&cat);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let m = cat.random_matrix(&mut rng);
            let g = AffineElement::linear(m);
            let f = w.random_n(&mut rng);
            let img = w.n_act(&f, &g);
            let s = perm_to_u16(&cat.projective_perm(&m));
            for i in 0..cat.k {
                if cat.affine_act(&g, cat.vectors[i]) == cat.vectors[i] {
                    let mut expected = vec![0u16; w.d];
                    conj_into(&mut expected, w.coord(&f, i), &s);
                    assert_eq!(w.coord(&img, i), &expected[..]);
                }
            }
        }
    }

    #[test]
    fn factor_action() {
        let cat = Catalog::from_q(5).unwrap();
        let w = Wreath::new(&cat);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = w.embed_n(w.random_n(&mut rng));
        assert!(w.conjugation_action_on_factors(&n).is_identity());
        let t = cat.t_group.generators()[0].clone();
        for _ in 0..50 {
            let g = w.random(&mut rng);
            let act = w.conjugation_action_on_factors(&g);
            assert_eq!(act, cat.affine_perm(&g.p));
            // direct expansion: conjugate an element of T_i and see where it lands
            let i = rng.gen_range(0..cat.k);
            let c = w.conj(&w.embed_n(w.n_single(i, &t)), &g);
            let j = act.apply(i as u32) as usize;
            assert!(w.in_t_i(&c.f, j) && !w.coord_is_identity(&c.f, j));
        }
        let wv = [1, 3];
        let tr = w.embed_p(AffineElement::translation(wv));
        let act = w.conjugation_action_on_factors(&tr);
        for i in 0..cat.k {
            assert_eq!(cat.vectors[act.apply(i as u32) as usize], cat.vec_add(cat.vectors[i], wv));
        }
        // Q is the stabilizer of the zero-vector factor
        for m in &cat.q_gens {
            let a = w.conjugation_action_on_factors(&w.embed_p(AffineElement::linear(*m)));
            assert_eq!(a.apply(cat.zero_index() as u32) as usize, cat.zero_index());
        }
        let a = w.conjugation_action_on_factors(&tr);
        assert_ne!(a.apply(cat.zero_index() as u32) as usize, cat.zero_index());
    }

    #[test]
    fn support_tests() {
        let cat = Catalog::from_q(4).unwrap();
        let w = Wreath::new(&cat);
        let id = w.n_identity();
        assert!((0..cat.k).all(|i| w.in_t_i(&id, i)));
        assert!(w.in_n_k(&id));
        let t = cat.t_group.generators()[0].clone();
        let last = w.n_single(cat.zero_index(), &t);
        assert!(!w.in_n_k(&last));
        assert!(w.in_t_i(&last, cat.zero_index()));
        assert!(!w.in_t_i(&last, 0));
    }

    #[test]
    fn diagonal_subgroup() {
        for q in [4u64, 5, 7] {
            let cat = Catalog::from_q(q).unwrap();
            let w = Wreath::new(&cat);
            let rep = w.verify_c_hat();
            assert!(rep.passed(), "q = {q}: {rep:?}");
            let id = w.expand(&w.c_hat(&Permutation::identity(w.d)));
            assert!(w.is_identity(&id));
        }
    }

    #[test]
    fn json_round_trip() {
        let cat = Catalog::from_q(4).unwrap();
        let w = Wreath::new(&cat);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = w.random(&mut rng);
        let s = serde_json::to_string(&w.to_json(&g)).unwrap();
        let back: TwElementJson = serde_json::from_str(&s).unwrap();
        assert_eq!(w.from_json(&back).unwrap(), g);
    }
}
