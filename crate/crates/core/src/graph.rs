//! The bipartite coset graph `Γ = Cos(G, P, RQ)`, explored locally.
//!
//! Vertices are labelled, not stored as group elements:
//!
//! * a left vertex `Pg` with `g = f·p` has label `f^p` (`N` is regular on
//!   the cosets of `P`, so labels are exactly the elements of `N`);
//! * a right vertex `RQg` with `g = f·τ(v)·M` is `RQ·m·τ(w)` for
//!   `m = f^M`, `w = vM`, and is labelled by the lex-least element of the
//!   coset `R·m` together with `w`.
//!
//! `G` acts on vertices by right multiplication. The whole graph is far
//! too large to store; everything here works on balls of radius at most
//! [`MAX_RADIUS`] around a vertex.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{AffineElement, Catalog, Vector};
use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation};
use crate::report::Outcome;
use crate::rsub::RData;
use crate::wreath::{perm_to_u16, NTuple, TwElement, Wreath};

pub const MAX_RADIUS: usize = 3;
pub const MAX_BALL_VERTICES: usize = 1_000_000;
/// Largest `|T|` accepted by [`CosetGraph::block_action_check`].
pub const MAX_BLOCK_POINTS: usize = 10_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum VertexId {
    Left(NTuple),
    Right(NTuple, Vector),
}

impl VertexId {
    pub fn is_left(&self) -> bool {
        matches!(self, VertexId::Left(_))
    }

    pub fn side(&self) -> &'static str {
        if self.is_left() {
            "left"
        } else {
            "right"
        }
    }
}

pub struct CosetGraph<'a> {
    pub w: Wreath<'a>,
    pub r: &'a RData,
    /// `ψ(v)` in vector order.
    r_elems: Vec<NTuple>,
    r_index: HashMap<NTuple, usize>,
    /// `τ(-x)` in vector order.
    tau_inv: Vec<AffineElement>,
    /// Elements of `T` in sorted order.
    t_elems: Vec<Vec<u16>>,
}

/// Ball around a vertex: vertices in BFS order (by depth, then label) and
/// neighbor indices for every vertex of depth below the radius.
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: VertexId,
    pub radius: usize,
    pub vertices: Vec<VertexId>,
    pub depth: Vec<usize>,
    pub index: HashMap<VertexId, usize>,
    pub adjacency: Vec<Option<Vec<u32>>>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertex count at each depth.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &d in &self.depth {
            out[d] += 1;
        }
        out
    }

    pub fn closed(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.adjacency[i].is_some())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ArcReport {
    pub one_arcs: usize,
    pub one_arc_orbits: usize,
    pub arcs: usize,
    pub arc_orbits: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockActionReport {
    pub points: usize,
    pub group_order: String,
    pub expected_order: String,
    pub diagonal_regular: bool,
    pub point_stabilizer_order: String,
    pub p_kernel_order: String,
    pub expected_kernel_order: String,
    pub primitive: bool,
}

impl BlockActionReport {
    pub fn passed(&self) -> bool {
        self.group_order == self.expected_order
            && self.diagonal_regular
            && self.point_stabilizer_order == self.points.to_string()
            && self.p_kernel_order == self.expected_kernel_order
            && self.primitive
    }
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            self.0[x as usize] = self.0[self.0[x as usize] as usize];
            x = self.0[x as usize];
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb) as usize] = ra.min(rb);
        }
    }

    fn classes(&mut self) -> usize {
        (0..self.0.len() as u32).filter(|&x| self.find(x) == x).count()
    }
}

impl<'a> CosetGraph<'a> {
    pub fn new(cat: &'a Catalog, r: &'a RData) -> Self {
        let w = Wreath::new(cat);
        let r_elems = r.elements(&w);
        let r_index = r_elems.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let tau_inv = cat.vectors.iter().map(|&x| AffineElement::translation(cat.vec_neg(x))).collect();
        let t_elems = cat
            .t_group
            .elements_sorted(MAX_BLOCK_POINTS as u128)
            .map(|ts| ts.iter().map(perm_to_u16).collect())
            .unwrap_or_default();
        CosetGraph { w, r, r_elems, r_index, tau_inv, t_elems }
    }

    pub fn cat(&self) -> &'a Catalog {
        self.w.cat
    }

    pub fn valency(&self) -> usize {
        self.cat().k
    }

    pub fn r_elements(&self) -> &[NTuple] {
        &self.r_elems
    }

    pub fn in_r(&self, f: &NTuple) -> bool {
        self.r_index.contains_key(f)
    }

    /// `(f, p) ∈ RQ` iff `p ∈ Q` and `f ∈ R`.
    pub fn in_rq(&self, g: &TwElement) -> bool {
        g.p.v == [0, 0] && self.in_r(&g.f)
    }

    /// Lex-least element of `R·m`.
    pub fn right_min(&self, m: &NTuple) -> NTuple {
        let d = self.w.d;
        let k = self.w.k;
        let mut best = self.w.n_mul(&self.r_elems[0], m).0;
        for r in &self.r_elems[1..] {
            'cmp: for x in 0..k {
                let base = x * d;
                for i in 0..d {
                    let v = m.0[base + r.0[base + i] as usize];
                    let j = base + i;
                    if v < best[j] {
                        best[j] = v;
                        for j2 in j + 1..k * d {
                            let x2 = j2 / d;
                            best[j2] = m.0[x2 * d + r.0[j2] as usize];
                        }
                        break 'cmp;
                    } else if v > best[j] {
                        break 'cmp;
                    }
                }
            }
        }
        NTuple(best)
    }

    pub fn canonical_left(&self, g: &TwElement) -> VertexId {
        VertexId::Left(self.w.n_act(&g.f, &g.p))
    }

    pub fn canonical_right(&self, g: &TwElement) -> VertexId {
        let cat = self.cat();
        let m = self.w.n_act(&g.f, &AffineElement::linear(g.p.m));
        VertexId::Right(self.right_min(&m), cat.vec_mat(g.p.v, &g.p.m))
    }

    /// The `N`-orbit invariant of a right vertex.
    pub fn n_orbit_invariant(&self, x: &VertexId) -> Option<Vector> {
        match x {
            VertexId::Right(_, w) => Some(*w),
            VertexId::Left(_) => None,
        }
    }

    /// Invariant of the right coset `RQg`, read off `g` directly.
    pub fn n_orbit_invariant_of(&self, g: &TwElement) -> Vector {
        self.cat().vec_mat(g.p.v, &g.p.m)
    }

    pub fn representative(&self, x: &VertexId) -> TwElement {
        match x {
            VertexId::Left(f) => self.w.embed_n(f.clone()),
            VertexId::Right(m, w) => TwElement { f: m.clone(), p: AffineElement::translation(*w) },
        }
    }

    /// Image of a vertex under right multiplication by `g`.
    pub fn act(&self, x: &VertexId, g: &TwElement) -> VertexId {
        match x {
            VertexId::Left(f) => VertexId::Left(self.w.n_act(&self.w.n_mul(f, &g.f), &g.p)),
            VertexId::Right(..) => self.canonical_right(&self.w.mul(&self.representative(x), g)),
        }
    }

    fn split<'v>(a: &'v VertexId, b: &'v VertexId) -> Option<(&'v VertexId, &'v VertexId)> {
        match (a, b) {
            (VertexId::Left(_), VertexId::Right(..)) => Some((a, b)),
            (VertexId::Right(..), VertexId::Left(_)) => Some((b, a)),
            _ => None,
        }
    }

    /// `Px ~ RQy` iff the `N`-part of `y·x⁻¹` lies in `R`.
    pub fn adjacent(&self, a: &VertexId, b: &VertexId) -> bool {
        let Some((l, r)) = Self::split(a, b) else { return false };
        let g = self.w.mul(&self.representative(r), &self.w.inv(&self.representative(l)));
        self.in_r(&g.f)
    }

    /// Same relation through `x·y⁻¹ ∈ PR`, i.e. `h^p ∈ R` for `x·y⁻¹ = h·p`.
    pub fn adjacent_via_right(&self, a: &VertexId, b: &VertexId) -> bool {
        let Some((l, r)) = Self::split(a, b) else { return false };
        let g = self.w.mul(&self.representative(l), &self.w.inv(&self.representative(r)));
        self.in_r(&self.w.n_act(&g.f, &g.p))
    }

    /// Neighbors in label order. Left `f`: `RQ·τ(w)·f` for `w ∈ V`; right
    /// `RQ·m·τ(w)`: `P·r·m·τ(w)` for `r ∈ R`.
    pub fn neighbors(&self, x: &VertexId) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = match x {
            VertexId::Left(f) => (0..self.valency())
                .map(|i| {
                    let m = self.w.n_act(f, &self.tau_inv[i]);
                    VertexId::Right(self.right_min(&m), self.cat().vectors[i])
                })
                .collect(),
            VertexId::Right(m, w) => {
                let t = AffineElement::translation(*w);
                self.r_elems.iter().map(|r| VertexId::Left(self.w.n_act(&self.w.n_mul(r, m), &t))).collect()
            }
        };
        out.sort();
        out.dedup();
        out
    }

    /// `u = P`.
    pub fn u(&self) -> VertexId {
        self.canonical_left(&self.w.identity())
    }

    /// `v = RQ`.
    pub fn v(&self) -> VertexId {
        self.canonical_right(&self.w.identity())
    }

    /// Generators of `G_u = P`.
    pub fn stabilizer_gens_u(&self) -> Vec<TwElement> {
        self.cat().p_gens.iter().map(|p| self.w.embed_p(*p)).collect()
    }

    /// Generators of `G_v = RQ`.
    pub fn stabilizer_gens_v(&self) -> Vec<TwElement> {
        let mut gens: Vec<TwElement> = self.r.basis_tuples(&self.w).into_iter().map(|f| self.w.embed_n(f)).collect();
        gens.extend(self.cat().q_gens.iter().map(|m| self.w.embed_p(AffineElement::linear(*m))));
        gens
    }

    pub fn bfs_ball(&self, center: &VertexId, radius: usize) -> Result<Ball> {
        if radius > MAX_RADIUS {
            return Err(Error::Guard(format!("radius {radius} exceeds {MAX_RADIUS}")));
        }
        let mut vertices = vec![center.clone()];
        let mut depth = vec![0];
        let mut index = HashMap::from([(center.clone(), 0usize)]);
        let mut adjacency: Vec<Option<Vec<u32>>> = vec![None];
        let mut layer = 0..1;
        for d in 0..radius {
            let lists: Vec<Vec<VertexId>> =
                vertices[layer.clone()].par_iter().map(|x| self.neighbors(x)).collect();
            let fresh: BTreeSet<&VertexId> =
                lists.iter().flatten().filter(|y| !index.contains_key(*y)).collect();
            if vertices.len() + fresh.len() > MAX_BALL_VERTICES {
                return Err(Error::Guard(format!("ball exceeds {MAX_BALL_VERTICES} vertices at depth {}", d + 1)));
            }
            let start = vertices.len();
            for y in fresh {
                index.insert(y.clone(), vertices.len());
                vertices.push(y.clone());
                depth.push(d + 1);
                adjacency.push(None);
            }
            for (i, list) in layer.clone().zip(&lists) {
                adjacency[i] = Some(list.iter().map(|y| index[y] as u32).collect());
            }
            layer = start..vertices.len();
        }
        Ok(Ball { center: center.clone(), radius, vertices, depth, index, adjacency })
    }

    /// Bipartite, every closed vertex has `q^2` distinct neighbors, and the
    /// neighbor lists are symmetric inside the ball.
    pub fn check_ball(&self, ball: &Ball) -> Outcome {
        let k = self.valency();
        let mut bipartite = true;
        let mut regular = true;
        let mut symmetric = true;
        for i in ball.closed() {
            let nb = ball.adjacency[i].as_ref().unwrap();
            regular &= nb.len() == k;
            for &j in nb {
                bipartite &= ball.vertices[i].is_left() != ball.vertices[j as usize].is_left();
                if let Some(back) = &ball.adjacency[j as usize] {
                    symmetric &= back.contains(&(i as u32));
                }
            }
        }
        Outcome::new(
            bipartite && regular && symmetric,
            json!({
                "center": ball.center.side(),
                "radius": ball.radius,
                "vertices": ball.len(),
                "layers": ball.layer_sizes(),
                "closed": ball.closed().count(),
                "bipartite": bipartite,
                "regular": regular,
                "valency": k,
                "symmetric": symmetric,
            }),
        )
    }

    /// Orbits of the given stabilizer generators on the 1-arcs and 2-arcs
    /// starting at the center of a ball of radius at least 2.
    pub fn two_arc_orbit_check(&self, ball: &Ball, stab_gens: &[TwElement]) -> Result<ArcReport> {
        if ball.radius < 2 {
            return Err(Error::Guard("two-arc check needs a ball of radius 2".into()));
        }
        for (i, s) in stab_gens.iter().enumerate() {
            if self.act(&ball.center, s) != ball.center {
                return Err(Error::Construction {
                    stage: "two_arc_orbit_check".into(),
                    detail: format!("stabilizer generator {i} moves the center"),
                });
            }
        }
        let images: Vec<Vec<u32>> = stab_gens
            .iter()
            .map(|s| {
                ball.vertices
                    .par_iter()
                    .map(|x| ball.index.get(&self.act(x, s)).map(|&j| j as u32).ok_or(()))
                    .collect::<std::result::Result<Vec<u32>, ()>>()
            })
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Construction {
                stage: "two_arc_orbit_check".into(),
                detail: "stabilizer generator maps the ball outside itself".into(),
            })?;
        let first = ball.adjacency[0].as_ref().unwrap();
        let mut arc_index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut arcs = Vec::new();
        for &a in first {
            for &b in ball.adjacency[a as usize].as_ref().unwrap() {
                if b != 0 {
                    arc_index.insert((a, b), arcs.len() as u32);
                    arcs.push((a, b));
                }
            }
        }
        let mut uf = UnionFind::new(arcs.len());
        for img in &images {
            for (i, &(a, b)) in arcs.iter().enumerate() {
                let j = *arc_index.get(&(img[a as usize], img[b as usize])).ok_or_else(|| Error::Construction {
                    stage: "two_arc_orbit_check".into(),
                    detail: "image of a 2-arc is not a 2-arc".into(),
                })?;
                uf.union(i as u32, j);
            }
        }
        let pos: HashMap<u32, u32> = first.iter().enumerate().map(|(i, &a)| (a, i as u32)).collect();
        let mut uf1 = UnionFind::new(first.len());
        for img in &images {
            for (i, &a) in first.iter().enumerate() {
                uf1.union(i as u32, pos[&img[a as usize]]);
            }
        }
        Ok(ArcReport { one_arcs: first.len(), one_arc_orbits: uf1.classes(), arcs: arcs.len(), arc_orbits: uf.classes() })
    }

    /// On a ball at `u`: right neighbors of `u` carry every invariant value
    /// once; the invariant is constant on sampled `N`-orbits; every closed
    /// left vertex (plus up to `extra_left` frontier ones) meets each
    /// invariant class exactly once, so the quotient is `K_{1,q^2}`.
    pub fn star_quotient_check<R: Rng + ?Sized>(&self, ball: &Ball, samples: usize, extra_left: usize, rng: &mut R) -> Outcome {
        let k = self.valency();
        let cat = self.cat();
        let rights: Vec<&VertexId> = ball.vertices.iter().filter(|x| !x.is_left()).collect();
        let mut constant = true;
        for x in &rights {
            let rep = self.representative(x);
            let w0 = self.n_orbit_invariant(x).unwrap();
            for _ in 0..samples {
                let g = self.w.mul(&rep, &self.w.embed_n(self.w.random_n(rng)));
                constant &= self.n_orbit_invariant_of(&g) == w0;
            }
        }
        let u_values: BTreeSet<Vector> = ball.adjacency[0]
            .as_ref()
            .map(|nb| nb.iter().filter_map(|&j| self.n_orbit_invariant(&ball.vertices[j as usize])).collect())
            .unwrap_or_default();
        let u_hits_all = u_values.len() == k;
        let lefts: Vec<&VertexId> = ball
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, x)| x.is_left() && ball.adjacency[*i].is_some())
            .map(|(_, x)| x)
            .chain(ball.vertices.iter().enumerate().filter(|(i, x)| x.is_left() && ball.adjacency[*i].is_none()).map(|(_, x)| x).take(extra_left))
            .collect();
        let one_per_class = lefts.par_iter().all(|x| {
            let vals: Vec<Vector> = self.neighbors(x).iter().filter_map(|y| self.n_orbit_invariant(y)).collect();
            vals.len() == k && vals.iter().collect::<HashSet<_>>().len() == k
        });
        let classes: BTreeSet<Vector> = rights.iter().filter_map(|x| self.n_orbit_invariant(x)).collect();
        let quotient_edges = u_values.len();
        let star = u_hits_all && classes.len() == k && quotient_edges == k && one_per_class;
        Outcome::new(
            constant && star,
            json!({
                "invariant_constant": constant,
                "samples_per_vertex": samples,
                "left_classes": 1,
                "right_classes": classes.len(),
                "quotient_edges": quotient_edges,
                "left_vertices_checked": lefts.len(),
                "each_left_meets_each_class_once": one_per_class,
                "v_invariant": self.n_orbit_invariant(&self.v()).map(|w| cat.index(w)),
            }),
        )
    }

    /// The action of `G_π` on the block `π = {f_t : t ∈ T}` of `u`.
    pub fn block_action_check(&self) -> Result<BlockActionReport> {
        let cat = self.cat();
        let ts = cat.t_group.elements_sorted(MAX_BLOCK_POINTS as u128)?;
        let n = ts.len();
        let pos: HashMap<Vec<u16>, u32> = ts.iter().enumerate().map(|(i, t)| (perm_to_u16(t), i as u32)).collect();
        let induced = |g: &TwElement| -> Result<Permutation> {
            let images = ts
                .iter()
                .map(|t| {
                    let x = VertexId::Left(self.w.expand(&self.w.c_hat(t)));
                    match self.act(&x, g) {
                        VertexId::Left(f) => self
                            .w
                            .as_diagonal(&f)
                            .and_then(|dg| pos.get(&perm_to_u16(&dg.t)).copied())
                            .ok_or_else(|| Error::Construction {
                                stage: "block_action_check".into(),
                                detail: "block is not mapped to itself".into(),
                            }),
                        _ => unreachable!(),
                    }
                })
                .collect::<Result<Vec<u32>>>()?;
            Permutation::from_images(images)
        };
        let diag_gens: Vec<Permutation> = cat
            .t_group
            .generators()
            .iter()
            .map(|t| induced(&self.w.embed_n(self.w.expand(&self.w.c_hat(t)))))
            .collect::<Result<_>>()?;
        let p_gens: Vec<Permutation> = self.stabilizer_gens_u().iter().map(&induced).collect::<Result<_>>()?;
        let diag = PermGroup::new(n, diag_gens.clone())?;
        let p_img = PermGroup::new(n, p_gens.clone())?;
        let all = PermGroup::new(n, diag_gens.into_iter().chain(p_gens).collect())?;
        let id = pos[&perm_to_u16(&Permutation::identity(self.w.d))];
        let stab = all.point_stabilizer(id)?;
        Ok(BlockActionReport {
            points: n,
            group_order: all.order().to_string(),
            expected_order: (n as u128 * n as u128).to_string(),
            diagonal_regular: diag.order() == n as u128 && diag.is_transitive(),
            point_stabilizer_order: stab.order().to_string(),
            p_kernel_order: (cat.p_group.order() / p_img.order()).to_string(),
            expected_kernel_order: ((cat.q as u128).pow(2) * cat.phi.kernel_order()).to_string(),
            primitive: all.is_primitive(),
        })
    }

    /// Key of the cell `N̂·f` of a left label: its lex-least element. The
    /// first coordinate `t·f_0` already determines `t`, since `T` acts
    /// regularly on itself.
    pub fn pi_cell_key(&self, f: &NTuple) -> Result<NTuple> {
        if self.t_elems.is_empty() {
            return Err(Error::Guard(format!("|T| exceeds {MAX_BLOCK_POINTS}")));
        }
        let f0 = self.w.coord(f, 0);
        let first = |t: &Vec<u16>| -> Vec<u16> { t.iter().map(|&x| f0[x as usize]).collect() };
        let t = self.t_elems.iter().min_by_key(|t| first(t)).unwrap();
        Ok(self.w.n_mul(&NTuple(t.repeat(self.w.k)), f))
    }

    /// Block property of `Π` on a ball at `u`: the cell of `u` has `|T|`
    /// labels; random `g ∈ G` send `N̂`-equivalent left labels from the ball
    /// to `N̂`-equivalent labels; `P` (which fixes `u`) preserves the cell
    /// partition of the ball's left vertices.
    pub fn pi_block_check<R: Rng + ?Sized>(&self, ball: &Ball, samples: usize, per_sample: usize, rng: &mut R) -> Result<Outcome> {
        if ball.radius < 2 {
            return Err(Error::Guard("block check needs a ball of radius 2".into()));
        }
        let id_key = self.pi_cell_key(&self.w.n_identity())?;
        let diag: Vec<NTuple> = self.t_elems.iter().map(|t| NTuple(t.repeat(self.w.k))).collect();
        let key = |f: &NTuple| self.pi_cell_key(f).unwrap();
        let u_cell: HashSet<&NTuple> = diag.iter().collect();
        let u_cell_ok = u_cell.len() == self.t_elems.len() && diag.iter().all(|f| key(f) == id_key);

        let lefts: Vec<&NTuple> = ball
            .vertices
            .iter()
            .filter_map(|x| match x {
                VertexId::Left(f) => Some(f),
                _ => None,
            })
            .collect();
        let trials: Vec<(TwElement, Vec<(usize, usize)>)> = (0..samples)
            .map(|_| {
                let g = self.w.random(rng);
                let picks = (0..per_sample).map(|_| (rng.gen_range(0..lefts.len()), rng.gen_range(0..diag.len()))).collect();
                (g, picks)
            })
            .collect();
        let image = |f: &NTuple, g: &TwElement| self.w.n_act(&self.w.n_mul(f, &g.f), &g.p);
        let sampled_ok = trials.par_iter().all(|(g, picks)| {
            picks.iter().all(|&(i, t)| {
                let f = lefts[i];
                key(&image(f, g)) == key(&image(&self.w.n_mul(&diag[t], f), g))
            })
        });

        // P permutes the left vertices of a ball at u
        let mut on_ball = true;
        if ball.center == self.u() {
            let pos: HashMap<&NTuple, u32> = lefts.iter().enumerate().map(|(i, f)| (*f, i as u32)).collect();
            let mut cells: BTreeMap<NTuple, Vec<u32>> = BTreeMap::new();
            for (i, f) in lefts.iter().enumerate() {
                cells.entry(key(f)).or_default().push(i as u32);
            }
            let gens: Option<Vec<Permutation>> = self
                .stabilizer_gens_u()
                .iter()
                .map(|s| {
                    let imgs: Option<Vec<u32>> = lefts.iter().map(|f| pos.get(&image(f, s)).copied()).collect();
                    imgs.and_then(|v| Permutation::from_images(v).ok())
                })
                .collect();
            on_ball = match gens {
                Some(gens) => PermGroup::new(lefts.len(), gens)?.is_block_system(&cells.into_values().collect::<Vec<_>>())?,
                None => false,
            };
        }
        Ok(Outcome::new(
            u_cell_ok && sampled_ok && on_ball,
            json!({
                "cell_of_u_size": u_cell.len(),
                "cell_of_u_ok": u_cell_ok,
                "random_elements": samples,
                "pairs_per_element": per_sample,
                "sampled_block_property": sampled_ok,
                "ball_left_vertices": lefts.len(),
                "p_preserves_ball_cells": on_ball,
            }),
        ))
    }

    /// Adjacency formula (both forms) against neighbor enumeration on every
    /// left/right pair of the ball.
    pub fn adjacency_oracle_exhaustive(&self, ball: &Ball) -> Outcome {
        let lefts: Vec<&VertexId> = ball.vertices.iter().filter(|x| x.is_left()).collect();
        let rights: Vec<&VertexId> = ball.vertices.iter().filter(|x| !x.is_left()).collect();
        let left_nb: Vec<HashSet<VertexId>> = lefts.par_iter().map(|x| self.neighbors(x).into_iter().collect()).collect();
        let right_nb: Vec<HashSet<VertexId>> = rights.par_iter().map(|x| self.neighbors(x).into_iter().collect()).collect();
        let mismatches: usize = lefts
            .par_iter()
            .enumerate()
            .map(|(i, l)| {
                rights
                    .iter()
                    .enumerate()
                    .filter(|(j, r)| {
                        let by_enum = left_nb[i].contains(**r);
                        by_enum != right_nb[*j].contains(*l)
                            || by_enum != self.adjacent(l, r)
                            || by_enum != self.adjacent_via_right(l, r)
                    })
                    .count()
            })
            .sum();
        let edges: usize = left_nb.iter().map(|s| rights.iter().filter(|r| s.contains(**r)).count()).sum();
        Outcome::new(
            mismatches == 0,
            json!({ "pairs": lefts.len() * rights.len(), "edges": edges, "mismatches": mismatches }),
        )
    }

    /// Same comparison on random pairs; every other pair is adjacent by
    /// construction (the right vertex of an element of the left coset).
    pub fn adjacency_oracle_random<R: Rng + ?Sized>(&self, pairs: usize, rng: &mut R) -> Outcome {
        let gens: Vec<(TwElement, TwElement)> = (0..pairs)
            .map(|i| {
                let g = self.w.random(rng);
                let h = if i % 2 == 0 {
                    self.w.mul(&self.w.embed_p(self.cat().random_affine(rng)), &g)
                } else {
                    self.w.random(rng)
                };
                (g, h)
            })
            .collect();
        let results: Vec<(bool, bool)> = gens
            .par_iter()
            .map(|(g, h)| {
                let (l, r) = (self.canonical_left(g), self.canonical_right(h));
                let by_enum = self.neighbors(&l).contains(&r);
                let agree = by_enum == self.neighbors(&r).contains(&l)
                    && by_enum == self.adjacent(&l, &r)
                    && by_enum == self.adjacent_via_right(&l, &r);
                (agree, by_enum)
            })
            .collect();
        let mismatches = results.iter().filter(|(a, _)| !a).count();
        let adjacent = results.iter().filter(|(_, e)| *e).count();
        Outcome::new(mismatches == 0, json!({ "pairs": pairs, "adjacent_pairs": adjacent, "mismatches": mismatches }))
    }

    pub fn vertex_json(&self, x: &VertexId) -> Value {
        let perms = |f: &NTuple| -> Vec<Vec<u16>> { f.0.chunks(self.w.d).map(|c| c.to_vec()).collect() };
        match x {
            VertexId::Left(f) => json!({ "side": "left", "label": perms(f) }),
            VertexId::Right(m, w) => json!({ "side": "right", "label": perms(m), "w": w }),
        }
    }

    /// One JSON object per line: id, depth, side, label, neighbor ids (null
    /// on the frontier).
    pub fn ball_jsonl(&self, ball: &Ball) -> String {
        let mut out = String::new();
        for (i, x) in ball.vertices.iter().enumerate() {
            let mut obj = self.vertex_json(x);
            obj["id"] = json!(i);
            obj["depth"] = json!(ball.depth[i]);
            obj["neighbors"] = json!(ball.adjacency[i]);
            out.push_str(&obj.to_string());
            out.push('\n');
        }
        out
    }

    pub fn ball_dot(&self, ball: &Ball) -> Result<String> {
        if ball.radius > 1 {
            return Err(Error::Guard("DOT output is limited to radius 1".into()));
        }
        let cat = self.cat();
        let mut out = String::from("graph ball {\n");
        for (i, x) in ball.vertices.iter().enumerate() {
            let (shape, label) = match x {
                VertexId::Left(_) => ("circle", format!("L{i}")),
                VertexId::Right(_, w) => ("box", format!("R{i} w={}", cat.index(*w))),
            };
            writeln!(out, "  n{i} [shape={shape}, label=\"{label}\"];").unwrap();
        }
        for i in ball.closed() {
            for &j in ball.adjacency[i].as_ref().unwrap() {
                if (j as usize) > i || ball.adjacency[j as usize].is_none() {
                    writeln!(out, "  n{i} -- n{j};").unwrap();
                }
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rsub::build_r;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixture(q: u64) -> (Catalog, RData) {
        let cat = Catalog::from_q(q).unwrap();
        let r = build_r(&cat).unwrap();
        (cat, r)
    }

    #[test]
    fn base_vertices() {
        let (cat, r) = fixture(4);
        let g = CosetGraph::new(&cat, &r);
        assert_eq!(g.u(), VertexId::Left(g.w.n_identity()));
        let VertexId::Right(m, w) = g.v() else { panic!() };
        assert_eq!(w, [0, 0]);
        assert_eq!(m, g.r_elements().iter().min().unwrap().clone());
        assert!(g.adjacent(&g.u(), &g.v()));
        assert_eq!(g.neighbors(&g.u()).len(), 16);
        assert_eq!(g.neighbors(&g.v()).len(), 16);
        let f = g.r_elements()[3].clone();
        assert_eq!(g.canonical_right(&g.w.embed_n(f.clone())), g.v());
        assert_eq!(g.canonical_left(&g.w.embed_n(f.clone())), VertexId::Left(f));
    }

    #[test]
    fn left_labels_are_coset_invariant() {
        let (cat, r) = fixture(5);
        let g = CosetGraph::new(&cat, &r);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x = g.w.random(&mut rng);
            let h = g.w.embed_p(cat.random_affine(&mut rng));
            assert_eq!(g.canonical_left(&g.w.mul(&h, &x)), g.canonical_left(&x));
        }
    }

    #[test]
    fn right_labels_match_membership_oracle() {
        let (cat, r) = fixture(4);
        let g = CosetGraph::new(&cat, &r);
        let w = &g.w;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut equal = 0;
        for i in 0..1000 {
            let a = w.random(&mut rng);
            let b = if i % 2 == 0 {
                let h = TwElement {
                    f: g.r_elements()[rng.gen_range(0..cat.k)].clone(),
                    p: AffineElement::linear(cat.random_matrix(&mut rng)),
                };
                assert!(g.in_rq(&h));
                w.mul(&h, &a)
            } else {
                w.random(&mut rng)
            };
            let same = g.canonical_right(&a) == g.canonical_right(&b);
            assert_eq!(same, g.in_rq(&w.mul(&a, &w.inv(&b))));
            equal += same as usize;
        }
        assert!(equal >= 500);
    }

    #[test]
    fn representatives_round_trip() {
        let (cat, r) = fixture(5);
        let g = CosetGraph::new(&cat, &r);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let x = g.w.random(&mut rng);
            let l = g.canonical_left(&x);
            assert_eq!(g.canonical_left(&g.representative(&l)), l);
            let rv = g.canonical_right(&x);
            assert_eq!(g.canonical_right(&g.representative(&rv)), rv);
        }
    }

    #[test]
    fn action_is_a_right_action() {
        let (cat, r) = fixture(4);
        let g = CosetGraph::new(&cat, &r);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let (a, b) = (g.w.random(&mut rng), g.w.random(&mut rng));
            for x in [g.canonical_left(&g.w.random(&mut rng)), g.canonical_right(&g.w.random(&mut rng))] {
                assert_eq!(g.act(&g.act(&x, &a), &b), g.act(&x, &g.w.mul(&a, &b)));
                let nb: BTreeSet<VertexId> = g.neighbors(&x).iter().map(|y| g.act(y, &a)).collect();
                assert_eq!(nb, g.neighbors(&g.act(&x, &a)).into_iter().collect());
            }
        }
    }

    #[test]
    fn small_balls() {
        let (cat, r) = fixture(4);
        let g = CosetGraph::new(&cat, &r);
        assert_eq!(g.bfs_ball(&g.u(), 0).unwrap().len(), 1);
        let b1 = g.bfs_ball(&g.u(), 1).unwrap();
        assert_eq!(b1.len(), 17);
        assert!(g.check_ball(&b1).passed);
        assert!(g.bfs_ball(&g.u(), 4).is_err());
        let dot = g.ball_dot(&b1).unwrap();
        assert_eq!(dot.matches(" -- ").count(), 16);
        assert_eq!(g.ball_jsonl(&b1).lines().count(), 17);
    }

    #[test]
    fn radius_two_at_q4() {
        let (cat, r) = fixture(4);
        let g = CosetGraph::new(&cat, &r);
        for (center, gens) in [(g.u(), g.stabilizer_gens_u()), (g.v(), g.stabilizer_gens_v())] {
            let ball = g.bfs_ball(&center, 2).unwrap();
            assert_eq!(ball.layer_sizes(), vec![1, 16, 240]);
            assert!(g.check_ball(&ball).passed);
            let rep = g.two_arc_orbit_check(&ball, &gens).unwrap();
            assert_eq!((rep.one_arcs, rep.one_arc_orbits, rep.arcs, rep.arc_orbits), (16, 1, 240, 1));
            assert!(g.adjacency_oracle_exhaustive(&ball).passed);
        }
        let ball = g.bfs_ball(&g.u(), 1).unwrap();
        // a generator of Q does not fix the center of a ball at v
        let bad = g.stabilizer_gens_u();
        let bv = g.bfs_ball(&g.v(), 2).unwrap();
        assert!(g.two_arc_orbit_check(&bv, &bad).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        assert!(g.star_quotient_check(&ball, 50, 0, &mut rng).passed);
    }

    #[test]
    fn block_action_q4_q5() {
        for (q, kernel) in [(4u64, "16"), (5, "50")] {
            let (cat, r) = fixture(q);
            let g = CosetGraph::new(&cat, &r);
            let rep = g.block_action_check().unwrap();
            assert_eq!(rep.points, 60);
            assert_eq!(rep.group_order, "3600");
            assert_eq!(rep.p_kernel_order, kernel);
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn pi_blocks() {
        let (cat, r) = fixture(4);
        let g = CosetGraph::new(&cat, &r);
        let ball = g.bfs_ball(&g.u(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let o = g.pi_block_check(&ball, 50, 5, &mut rng).unwrap();
        assert!(o.passed, "{}", o.witness);
        let t = cat.t_group.generators()[0].clone();
        let f = g.w.random_n(&mut rng);
        let ft = g.w.expand(&g.w.c_hat(&t));
        assert_eq!(g.pi_cell_key(&g.w.n_mul(&ft, &f)).unwrap(), g.pi_cell_key(&f).unwrap());
        // oracle: lex-min over the whole cell
        let ts = cat.t_group.elements_sorted(100).unwrap();
        let brute = ts.iter().map(|t| g.w.n_mul(&g.w.expand(&g.w.c_hat(t)), &f)).min().unwrap();
        assert_eq!(g.pi_cell_key(&f).unwrap(), brute);
        // cells f·N̂ (right multiplication) are not preserved
        let right_key = |f: &NTuple| ts.iter().map(|t| g.w.n_mul(f, &g.w.expand(&g.w.c_hat(t)))).min().unwrap();
        let broken = (0..50).any(|_| {
            let x = g.w.random(&mut rng);
            let img = |f: &NTuple| g.w.n_act(&g.w.n_mul(f, &x.f), &x.p);
            right_key(&img(&f)) != right_key(&img(&g.w.n_mul(&f, &ft)))
        });
        assert!(broken);
    }

    #[test]
    fn random_adjacency_oracle_q5() {
        let (cat, r) = fixture(5);
        let g = CosetGraph::new(&cat, &r);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let o = g.adjacency_oracle_random(200, &mut rng);
        assert!(o.passed, "{}", o.witness);
        assert!(o.witness["adjacent_pairs"].as_u64().unwrap() >= 100);
    }

    #[test]
    fn ball_is_thread_count_independent() {
        let (cat, r) = fixture(4);
        let g = CosetGraph::new(&cat, &r);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| g.bfs_ball(&g.v(), 2).unwrap());
        let b = four.install(|| g.bfs_ball(&g.v(), 2).unwrap());
        assert_eq!(a.vertices, b.vertices);
        assert_eq!(a.adjacency, b.adjacency);
    }
}
