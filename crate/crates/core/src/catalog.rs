//! The ingredient groups: `Q = SL(2,q)`, `P = V ⋊ Q` on `V = F_q^2`,
//! `T = PSL(2,q)` on the projective line, and `φ: Q -> T`.
//!
//! Vectors are rows and matrices act on the right. The affine element
//! `(v, M)` is the map `x ↦ (x + v)M`, i.e. the translation by `v` followed
//! by `M`, and products compose left to right like permutations.
//!
//! Vector order: the nonzero vectors in lexicographic order of their two
//! field coordinates, then the zero vector last. Index `i` (0-based) is the
//! vector `z_{i+1}`; the zero vector has index `k - 1`.
//!
//! Left transversal of `Q` in `P`: the coset labelled by the vector `x` is
//! `τ(-x)·Q`, where `τ(w)` is the translation by `w`. With this labelling,
//! `P` acting on cosets by `zQ ↦ g⁻¹zQ` is exactly the affine action on
//! `V`, so factor indices and vector indices move together.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{prime_power, FieldSpec, Fq};
use crate::perm::{Homomorphism, PermGroup, Permutation};

/// Largest `q` accepted by [`Catalog::new`].
pub const MAX_CATALOG_Q: u32 = 32;

pub type Vector = [Fq; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Matrix2(pub [[Fq; 2]; 2]);

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2([[1, 0], [0, 1]]);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AffineElement {
    pub v: Vector,
    pub m: Matrix2,
}

impl AffineElement {
    pub const IDENTITY: AffineElement = AffineElement { v: [0, 0], m: Matrix2::IDENTITY };

    pub fn translation(v: Vector) -> Self {
        AffineElement { v, m: Matrix2::IDENTITY }
    }

    pub fn linear(m: Matrix2) -> Self {
        AffineElement { v: [0, 0], m }
    }
}

/// Families satisfying the hypothesis of the construction. Only the first
/// is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `q^2 : SL(2,q)`, `q >= 4`.
    AffineSl2,
    /// `q^4 : Sp(4,q)`.
    AffineSp4,
    /// `3^6 : SL(2,13)`.
    Affine3To6Sl2_13,
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub q: u32,
    pub p: u32,
    pub degree: usize,
    /// `P` is 2-transitive on `V`.
    pub two_transitive: bool,
    pub stabilizer_order: u128,
    pub centre_order: usize,
    /// `|Z(Q_x)|` is nontrivial and divisible by `p`.
    pub centre_ok: bool,
    pub image_order: u128,
    pub psl_order: u128,
    /// `|φ(Q)| = |PSL(2,q)|`.
    pub phi_ok: bool,
    pub kernel_order: u128,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.two_transitive && self.centre_ok && self.phi_ok
    }
}

pub struct Catalog {
    pub field: FieldSpec,
    pub q: u32,
    /// `k = q^2`.
    pub k: usize,
    pub vectors: Vec<Vector>,
    index_of_code: Vec<usize>,
    /// Projective points `[1:0]`, then `[x:1]` in field order.
    pub proj_points: Vec<Vector>,
    pub q_gens: Vec<Matrix2>,
    /// Translations by `(b, 0)` and `(0, b)` for the field basis, then `Q`.
    pub p_gens: Vec<AffineElement>,
    pub p_group: PermGroup,
    pub phi: Homomorphism,
    pub t_group: PermGroup,
    pub kernel_phi: Vec<Matrix2>,
}

impl std::fmt::Debug for Catalog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Catalog").field("q", &self.q).field("modulus", &self.field.modulus_string()).finish()
    }
}

pub fn sl2_order(q: u64) -> u128 {
    q as u128 * (q as u128 * q as u128 - 1)
}

pub fn psl2_order(q: u64) -> u128 {
    sl2_order(q) / if q % 2 == 1 { 2 } else { 1 }
}

impl Catalog {
    pub fn for_family(family: Family, q: u64) -> Result<Catalog> {
        match family {
            Family::AffineSl2 => Catalog::from_q(q),
            other => Err(Error::UnsupportedQ {
                q,
                reason: format!("{other:?} satisfies the hypothesis but is not constructed"),
            }),
        }
    }

    pub fn from_q(q: u64) -> Result<Catalog> {
        let (p, m) = prime_power(q).ok_or_else(|| Error::UnsupportedQ { q, reason: "not a prime power".into() })?;
        Catalog::new(p, m)
    }

    pub fn new(p: u32, m: u32) -> Result<Catalog> {
        let q = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if !crate::field::is_prime(p as u64) {
            return Err(Error::UnsupportedQ { q, reason: format!("{p} is not prime") });
        }
        if q < 4 {
            return Err(Error::UnsupportedQ { q, reason: "q must be at least 4".into() });
        }
        if q > MAX_CATALOG_Q as u64 {
            return Err(Error::UnsupportedQ { q, reason: format!("q above {MAX_CATALOG_Q} is not supported") });
        }
        let field = FieldSpec::new(p, m)?;
        let q = q as u32;
        let k = (q * q) as usize;
        let mut vectors: Vec<Vector> = (1..k as u32).map(|c| [c / q, c % q]).collect();
        vectors.push([0, 0]);
        let mut index_of_code = vec![0; k];
        for (i, v) in vectors.iter().enumerate() {
            index_of_code[(v[0] * q + v[1]) as usize] = i;
        }
        let mut proj_points = vec![[1, 0]];
        proj_points.extend((0..q).map(|x| [x, 1]));

        let basis = field.basis();
        let mut q_gens: Vec<Matrix2> = basis.iter().map(|&t| Matrix2([[1, t], [0, 1]])).collect();
        q_gens.extend(basis.iter().map(|&t| Matrix2([[1, 0], [t, 1]])));
        let mut p_gens: Vec<AffineElement> = basis.iter().map(|&b| AffineElement::translation([b, 0])).collect();
        p_gens.extend(basis.iter().map(|&b| AffineElement::translation([0, b])));
        p_gens.extend(q_gens.iter().map(|&g| AffineElement::linear(g)));

        let mut cat = Catalog {
            field,
            q,
            k,
            vectors,
            index_of_code,
            proj_points,
            q_gens,
            p_gens,
            // placeholders, replaced below
            p_group: PermGroup::new(1, vec![])?,
            phi: Homomorphism::by_images(PermGroup::new(1, vec![])?, vec![])?,
            t_group: PermGroup::new(1, vec![])?,
            kernel_phi: Vec::new(),
        };
        let p_perms = cat.p_gens.iter().map(|g| cat.affine_perm(g)).collect();
        cat.p_group = PermGroup::new(k, p_perms)?;
        let q_perms: Vec<Permutation> = cat.q_gens.iter().map(|g| cat.matrix_perm(g)).collect();
        let t_gens: Vec<Permutation> = cat.q_gens.iter().map(|g| cat.projective_perm(g)).collect();
        let q_group = PermGroup::new(k, q_perms)?;
        cat.phi = Homomorphism::by_images(q_group, t_gens.clone()).map_err(|e| Error::Construction {
            stage: "phi".into(),
            detail: e.to_string(),
        })?;
        cat.t_group = PermGroup::new(q as usize + 1, t_gens)?;
        let minus_one = cat.field.neg(1);
        cat.kernel_phi = if minus_one == 1 {
            vec![Matrix2::IDENTITY]
        } else {
            vec![Matrix2::IDENTITY, Matrix2([[minus_one, 0], [0, minus_one]])]
        };
        Ok(cat)
    }

    pub fn p(&self) -> u32 {
        self.field.p
    }

    pub fn m(&self) -> u32 {
        self.field.m
    }

    pub fn q_group(&self) -> &PermGroup {
        self.phi.domain()
    }

    pub fn t_degree(&self) -> usize {
        self.q as usize + 1
    }

    pub fn index(&self, v: Vector) -> usize {
        self.index_of_code[(v[0] * self.q + v[1]) as usize]
    }

    pub fn zero_index(&self) -> usize {
        self.k - 1
    }

    // --- vectors and matrices -------------------------------------------

    pub fn vec_add(&self, a: Vector, b: Vector) -> Vector {
        [self.field.add(a[0], b[0]), self.field.add(a[1], b[1])]
    }

    pub fn vec_neg(&self, a: Vector) -> Vector {
        [self.field.neg(a[0]), self.field.neg(a[1])]
    }

    /// Row vector times matrix.
    pub fn vec_mat(&self, x: Vector, m: &Matrix2) -> Vector {
        let f = &self.field;
        let [[a, b], [c, d]] = m.0;
        [f.add(f.mul(x[0], a), f.mul(x[1], c)), f.add(f.mul(x[0], b), f.mul(x[1], d))]
    }

    pub fn mat_mul(&self, x: &Matrix2, y: &Matrix2) -> Matrix2 {
        Matrix2([self.vec_mat(x.0[0], y), self.vec_mat(x.0[1], y)])
    }

    pub fn det(&self, x: &Matrix2) -> Fq {
        let f = &self.field;
        let [[a, b], [c, d]] = x.0;
        f.sub(f.mul(a, d), f.mul(b, c))
    }

    /// Inverse of a determinant-one matrix.
    pub fn mat_inv(&self, x: &Matrix2) -> Matrix2 {
        let f = &self.field;
        let [[a, b], [c, d]] = x.0;
        let di = f.inv(self.det(x)).expect("singular matrix");
        Matrix2([[f.mul(d, di), f.mul(f.neg(b), di)], [f.mul(f.neg(c), di), f.mul(a, di)]])
    }

    /// `F_p` coordinates of a vector: both field coordinates, `m` digits each.
    pub fn vec_coords(&self, x: Vector) -> Vec<u32> {
        let mut c = self.field.coords(x[0]);
        c.extend(self.field.coords(x[1]));
        c
    }

    pub fn vec_from_coords(&self, c: &[u32]) -> Vector {
        let m = self.m() as usize;
        [self.field.from_coords(&c[..m]), self.field.from_coords(&c[m..])]
    }

    // --- affine group -----------------------------------------------------

    pub fn affine_mul(&self, a: &AffineElement, b: &AffineElement) -> AffineElement {
        // x ↦ ((x + va)Ma + vb)Mb = (x + va + vb Ma⁻¹) Ma Mb
        let vb = self.vec_mat(b.v, &self.mat_inv(&a.m));
        AffineElement { v: self.vec_add(a.v, vb), m: self.mat_mul(&a.m, &b.m) }
    }

    pub fn affine_inv(&self, a: &AffineElement) -> AffineElement {
        AffineElement { v: self.vec_neg(self.vec_mat(a.v, &a.m)), m: self.mat_inv(&a.m) }
    }

    pub fn affine_act(&self, g: &AffineElement, x: Vector) -> Vector {
        self.vec_mat(self.vec_add(x, g.v), &g.m)
    }

    /// `g = τ(v)·q` with `τ(v)` a translation and `q ∈ Q`.
    pub fn decompose(&self, g: &AffineElement) -> (AffineElement, Matrix2) {
        (AffineElement::translation(g.v), g.m)
    }

    pub fn recompose(&self, v: &AffineElement, q: &Matrix2) -> AffineElement {
        self.affine_mul(v, &AffineElement::linear(*q))
    }

    /// Coset representative `τ(-x)` for the vector of index `i`.
    pub fn transversal_element(&self, i: usize) -> AffineElement {
        AffineElement::translation(self.vec_neg(self.vectors[i]))
    }

    /// Index of the left coset `gQ`.
    pub fn coset_index(&self, g: &AffineElement) -> usize {
        let (v, _) = self.decompose(g);
        self.index(self.vec_neg(v.v))
    }

    pub fn affine_perm(&self, g: &AffineElement) -> Permutation {
        let images = self.vectors.iter().map(|&x| self.index(self.affine_act(g, x)) as u32).collect();
        Permutation::from_images(images).expect("affine map is a bijection")
    }

    pub fn matrix_perm(&self, m: &Matrix2) -> Permutation {
        self.affine_perm(&AffineElement::linear(*m))
    }

    /// Reads a matrix back from its permutation of `V`.
    pub fn matrix_of_perm(&self, g: &Permutation) -> Matrix2 {
        let row = |e: Vector| self.vectors[g.apply(self.index(e) as u32) as usize];
        Matrix2([row([1, 0]), row([0, 1])])
    }

    pub fn affine_of_perm(&self, g: &Permutation) -> AffineElement {
        // g: x ↦ (x + v)M, so 0 ↦ vM and x ↦ xM + vM
        let zero_img = self.vectors[g.apply(self.zero_index() as u32) as usize];
        let row = |e: Vector| {
            let y = self.vectors[g.apply(self.index(e) as u32) as usize];
            self.vec_add(y, self.vec_neg(zero_img))
        };
        let m = Matrix2([row([1, 0]), row([0, 1])]);
        AffineElement { v: self.vec_mat(zero_img, &self.mat_inv(&m)), m }
    }

    pub fn proj_index(&self, x: Vector) -> usize {
        if x[1] == 0 {
            0
        } else {
            let f = &self.field;
            1 + f.mul(x[0], f.inv(x[1]).unwrap()) as usize
        }
    }

    /// Action of a matrix on the projective line. This is `φ` computed
    /// directly, independent of the homomorphism machinery.
    pub fn projective_perm(&self, m: &Matrix2) -> Permutation {
        let images = self.proj_points.iter().map(|&x| self.proj_index(self.vec_mat(x, m)) as u32).collect();
        Permutation::from_images(images).expect("projective action is a bijection")
    }

    /// `φ(M)` evaluated through the homomorphism handle.
    pub fn phi_of(&self, m: &Matrix2) -> Result<Permutation> {
        self.phi.apply(&self.matrix_perm(m))
    }

    pub fn random_matrix<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix2 {
        self.matrix_of_perm(&self.q_group().random_element(rng))
    }

    pub fn random_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        [rng.gen_range(0..self.q), rng.gen_range(0..self.q)]
    }

    pub fn random_affine<R: Rng + ?Sized>(&self, rng: &mut R) -> AffineElement {
        AffineElement { v: self.random_vector(rng), m: self.random_matrix(rng) }
    }

    /// `Q_1`, the stabilizer in `Q` of `z_1`, as a permutation group on `V`.
    pub fn q1(&self) -> Result<PermGroup> {
        self.q_group().point_stabilizer(0)
    }

    /// Coset action of `P` on `[P:Q]` agrees with the affine action under
    /// `z_i Q ↦ z_i`, for every generator and every coset.
    pub fn check_coset_intertwining(&self) -> bool {
        self.p_gens.iter().all(|g| {
            let ginv = self.affine_inv(g);
            (0..self.k).all(|i| {
                let j = self.coset_index(&self.affine_mul(&ginv, &self.transversal_element(i)));
                self.vectors[j] == self.affine_act(g, self.vectors[i])
            })
        })
    }

    pub fn check_hypothesis(&self) -> Result<HypothesisReport> {
        let two_transitive = self.p_group.degree() == self.k && self.p_group.is_2_transitive();
        let qx = self.q1()?;
        let elements = qx.elements_sorted(1 << 20)?;
        let centre_order = elements
            .iter()
            .filter(|z| qx.generators().iter().all(|g| z.mul(g) == g.mul(z)))
            .count();
        let image_order = self.phi.image_group().order();
        let psl_order = psl2_order(self.q as u64);
        Ok(HypothesisReport {
            q: self.q,
            p: self.p(),
            degree: self.k,
            two_transitive,
            stabilizer_order: qx.order(),
            centre_order,
            centre_ok: centre_order > 1 && centre_order % self.p() as usize == 0,
            image_order,
            psl_order,
            phi_ok: image_order == psl_order && image_order == self.t_group.order(),
            kernel_order: self.phi.kernel_order(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::ModuleAction;
    use crate::fpmat::FpMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Every matrix of determinant one, by exhaustive scan.
    fn sl2_brute(cat: &Catalog) -> Vec<Matrix2> {
        let q = cat.q;
        let mut out = Vec::new();
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        let m = Matrix2([[a, b], [c, d]]);
                        if cat.det(&m) == 1 {
                            out.push(m);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn orders_for_small_q() {
        for (p, m, q_ord, p_ord, t_ord, ker) in
            [(2, 2, 60u128, 960u128, 60u128, 1u128), (5, 1, 120, 3000, 60, 2), (7, 1, 336, 16464, 168, 2)]
        {
            let cat = Catalog::new(p, m).unwrap();
            assert_eq!(sl2_brute(&cat).len() as u128, q_ord);
            assert_eq!(cat.q_group().order(), q_ord);
            assert_eq!(cat.p_group.order(), p_ord);
            assert_eq!(cat.t_group.order(), t_ord);
            assert_eq!(cat.phi.kernel_order(), ker);
        }
    }

    #[test]
    fn order_formulas_for_all_small_q() {
        for q in [4u64, 5, 7, 8, 9, 11, 13, 16] {
            let cat = Catalog::from_q(q).unwrap();
            assert_eq!(cat.p_group.order(), (q * q) as u128 * sl2_order(q), "q = {q}");
            assert_eq!(cat.t_group.order(), psl2_order(q), "q = {q}");
        }
    }

    #[test]
    fn phi_kernel_by_scan() {
        for (q, expected) in [(4u64, 1usize), (5, 2)] {
            let cat = Catalog::from_q(q).unwrap();
            let ker = sl2_brute(&cat)
                .iter()
                .filter(|m| cat.phi_of(m).unwrap().is_identity())
                .count();
            assert_eq!(ker, expected);
            for m in &cat.kernel_phi {
                assert!(cat.projective_perm(m).is_identity());
            }
        }
    }

    #[test]
    fn vector_order() {
        let cat = Catalog::from_q(4).unwrap();
        assert_eq!(cat.vectors[0], [0, 1]);
        assert_eq!(cat.vectors[cat.k - 1], [0, 0]);
        assert!(cat.vectors[..cat.k - 1].windows(2).all(|w| w[0] < w[1]));
        for (i, &v) in cat.vectors.iter().enumerate() {
            assert_eq!(cat.index(v), i);
        }
        assert_eq!(cat.proj_points[0], [1, 0]);
        assert_eq!(cat.proj_points[1], [0, 1]);
    }

    #[test]
    fn affine_action_basics() {
        let cat = Catalog::from_q(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = cat.random_vector(&mut rng);
            let w = cat.random_vector(&mut rng);
            assert_eq!(cat.affine_act(&AffineElement::IDENTITY, x), x);
            assert_eq!(cat.affine_act(&AffineElement::translation(w), x), cat.vec_add(x, w));
        }
    }

    #[test]
    fn affine_group_axioms() {
        for q in [4u64, 5, 9] {
            let cat = Catalog::from_q(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(q);
            for _ in 0..1000 {
                let a = cat.random_affine(&mut rng);
                let b = cat.random_affine(&mut rng);
                let c = cat.random_affine(&mut rng);
                assert_eq!(
                    cat.affine_mul(&cat.affine_mul(&a, &b), &c),
                    cat.affine_mul(&a, &cat.affine_mul(&b, &c))
                );
                assert_eq!(cat.affine_mul(&a, &cat.affine_inv(&a)), AffineElement::IDENTITY);
                let x = cat.random_vector(&mut rng);
                assert_eq!(cat.affine_act(&cat.affine_mul(&a, &b), x), cat.affine_act(&b, cat.affine_act(&a, x)));
                assert_eq!(cat.affine_perm(&cat.affine_mul(&a, &b)), cat.affine_perm(&a).mul(&cat.affine_perm(&b)));
                assert_eq!(cat.affine_of_perm(&cat.affine_perm(&a)), a);
            }
        }
    }

    #[test]
    fn decompose_round_trip() {
        let cat = Catalog::from_q(7).unwrap();
        let w = [3, 4];
        assert_eq!(cat.decompose(&AffineElement::translation(w)), (AffineElement::translation(w), Matrix2::IDENTITY));
        let m = cat.q_gens[1];
        assert_eq!(cat.decompose(&AffineElement::linear(m)), (AffineElement::IDENTITY, m));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let g = cat.random_affine(&mut rng);
            let (v, q) = cat.decompose(&g);
            assert_eq!(v.m, Matrix2::IDENTITY);
            assert_eq!(cat.det(&q), 1);
            assert_eq!(cat.recompose(&v, &q), g);
        }
    }

    #[test]
    fn phi_is_a_homomorphism() {
        for q in [4u64, 5, 8, 9] {
            let cat = Catalog::from_q(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(q + 100);
            for _ in 0..1000 {
                let a = cat.random_matrix(&mut rng);
                let b = cat.random_matrix(&mut rng);
                let ab = cat.mat_mul(&a, &b);
                assert_eq!(cat.projective_perm(&ab), cat.projective_perm(&a).mul(&cat.projective_perm(&b)));
            }
            for _ in 0..50 {
                let a = cat.random_matrix(&mut rng);
                assert_eq!(cat.phi_of(&a).unwrap(), cat.projective_perm(&a));
            }
        }
    }

    #[test]
    fn coset_action_matches_affine_action() {
        for q in [4u64, 5, 9] {
            assert!(Catalog::from_q(q).unwrap().check_coset_intertwining());
        }
    }

    #[test]
    fn hypothesis_for_supported_q() {
        for (q, centre) in [(4u64, 4usize), (5, 5), (7, 7), (8, 8), (9, 9)] {
            let cat = Catalog::from_q(q).unwrap();
            let rep = cat.check_hypothesis().unwrap();
            assert!(rep.passed(), "{rep:?}");
            assert_eq!(rep.centre_order, centre);
            assert_eq!(rep.stabilizer_order, q as u128);
        }
    }

    #[test]
    fn q1_is_the_unipotent_group() {
        let cat = Catalog::from_q(4).unwrap();
        let q1 = cat.q1().unwrap();
        let brute: Vec<_> = sl2_brute(&cat).into_iter().filter(|m| cat.vec_mat([0, 1], m) == [0, 1]).collect();
        assert_eq!(brute.len(), 4);
        assert_eq!(q1.order(), 4);
        for m in brute {
            assert!(q1.contains(&cat.matrix_perm(&m)));
        }
    }

    #[test]
    fn natural_module_words_match_matrix_products() {
        let cat = Catalog::from_q(9).unwrap();
        let n = 2 * cat.m() as usize;
        let to_fp = |m: &Matrix2| {
            let rows: Vec<Vec<u32>> = (0..n)
                .map(|i| {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    cat.vec_coords(cat.vec_mat(cat.vec_from_coords(&e), m))
                })
                .collect();
            FpMatrix::from_rows(&rows, n, cat.p()).unwrap()
        };
        let module = ModuleAction::new(cat.p(), n, cat.q_gens.iter().map(to_fp).collect()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let len = rng.gen_range(0..=8);
            let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..cat.q_gens.len())).collect();
            let direct = word.iter().fold(Matrix2::IDENTITY, |acc, &i| cat.mat_mul(&acc, &cat.q_gens[i]));
            assert_eq!(module.word(&word), to_fp(&direct));
        }
    }

    #[test]
    fn rejects_bad_q() {
        assert!(Catalog::from_q(6).is_err());
        assert!(Catalog::from_q(3).is_err());
        assert!(Catalog::from_q(2).is_err());
        assert!(Catalog::for_family(Family::AffineSp4, 4).is_err());
        assert!(Catalog::for_family(Family::Affine3To6Sl2_13, 13).is_err());
    }
}
