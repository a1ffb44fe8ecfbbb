//! Permutations and permutation groups.
//!
//! Action convention: permutations act on the right, so `x^g` is
//! `g.apply(x)`, and the product `a * b` means "first `a`, then `b`":
//! `x^(ab) = (x^a)^b`. Every group action in this crate uses it.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest degree accepted by [`PermGroup::new`].
pub const MAX_DEGREE: usize = 1_000_000;

/// A bijection of `{0, …, degree-1}` stored as its image sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    images: Vec<u32>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<u32>) -> Result<Self> {
        Permutation::from_images(images)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Vec<u32> {
        p.images
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u32).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::NotAPermutation);
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from disjoint cycles; points not listed are fixed.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                let b = cycle[(i + 1) % cycle.len()];
                if a as usize >= degree || b as usize >= degree {
                    return Err(Error::NotAPermutation);
                }
                images[a as usize] = b;
            }
        }
        Permutation::from_images(images)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self * other`: apply `self` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.mul(other))
    }

    /// Unchecked `self * other`. Panics on degree mismatch.
    pub fn mul(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `g^-1 * self * g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.inverse().mul(self).mul(g)
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut l: u64 = 1;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
                len += 1;
            }
            l = lcm(l, len);
        }
        l
    }

    pub fn first_moved_point(&self) -> Option<u32> {
        self.images.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i as u32)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

struct Level {
    base: u32,
    orbit: Vec<u32>,
    // position of each domain point in `orbit`, u32::MAX when absent
    pos: Vec<u32>,
    // reps[i] maps `base` to `orbit[i]`
    reps: Vec<Permutation>,
    checked: HashSet<(u32, u32)>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Self {
        let mut pos = vec![u32::MAX; degree];
        pos[base as usize] = 0;
        Level {
            base,
            orbit: vec![base],
            pos,
            reps: vec![Permutation::identity(degree)],
            checked: HashSet::new(),
        }
    }

    fn rep_for(&self, x: u32) -> Option<&Permutation> {
        match self.pos[x as usize] {
            u32::MAX => None,
            i => Some(&self.reps[i as usize]),
        }
    }
}

/// Base and strong generating set with explicit transversals.
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
    sgs: Vec<Permutation>,
    // number of leading base points fixed by each strong generator
    depth: Vec<usize>,
}

impl StabChain {
    /// Deterministic Schreier–Sims. Base points are `prefix` followed by
    /// the smallest point moved by each new residue.
    pub fn build(degree: usize, gens: &[Permutation], prefix: &[u32]) -> StabChain {
        let mut chain = StabChain { degree, levels: Vec::new(), sgs: Vec::new(), depth: Vec::new() };
        for &b in prefix {
            chain.push_level(b);
        }
        for g in gens {
            if g.is_identity() || chain.sgs.contains(g) {
                continue;
            }
            if chain.fixed_prefix(g) == chain.levels.len() {
                chain.push_level(g.first_moved_point().unwrap());
            }
            chain.add_strong(g.clone());
        }
        for l in 0..chain.levels.len() {
            chain.update_orbit(l);
        }
        let mut i = chain.levels.len();
        while i > 0 {
            let l = i - 1;
            match chain.check_level(l) {
                None => i -= 1,
                Some((h, j)) => {
                    if j == chain.levels.len() {
                        chain.push_level(h.first_moved_point().unwrap());
                    }
                    chain.add_strong(h);
                    for m in l + 1..=j {
                        chain.update_orbit(m);
                    }
                    i = j + 1;
                }
            }
        }
        chain
    }

    fn push_level(&mut self, b: u32) {
        self.levels.push(Level::new(b, self.degree));
        let n = self.levels.len();
        for (g, d) in self.sgs.iter().zip(self.depth.iter_mut()) {
            if *d == n - 1 && g.apply(b) == b {
                *d = n;
            }
        }
    }

    fn fixed_prefix(&self, g: &Permutation) -> usize {
        self.levels.iter().take_while(|lv| g.apply(lv.base) == lv.base).count()
    }

    fn add_strong(&mut self, g: Permutation) {
        let d = self.fixed_prefix(&g);
        self.sgs.push(g);
        self.depth.push(d);
    }

    fn level_gens(&self, l: usize) -> impl Iterator<Item = (usize, &Permutation)> {
        self.sgs.iter().enumerate().filter(move |(i, _)| self.depth[*i] >= l)
    }

    fn update_orbit(&mut self, l: usize) {
        let gens: Vec<(usize, Permutation)> =
            self.level_gens(l).map(|(i, g)| (i, g.clone())).collect();
        let level = &mut self.levels[l];
        let mut idx = 0;
        while idx < level.orbit.len() {
            let x = level.orbit[idx];
            for (_, g) in &gens {
                let y = g.apply(x);
                if level.pos[y as usize] == u32::MAX {
                    level.pos[y as usize] = level.orbit.len() as u32;
                    let rep = level.reps[idx].mul(g);
                    level.orbit.push(y);
                    level.reps.push(rep);
                }
            }
            idx += 1;
        }
    }

    /// Sifts `g` starting at level `from`. Returns the residue and the level
    /// at which sifting stopped (`levels.len()` if it went all the way).
    fn sift_from(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for l in from..self.levels.len() {
            let lv = &self.levels[l];
            let x = g.apply(lv.base);
            match lv.rep_for(x) {
                None => return (g, l),
                Some(rep) => g = g.mul(&rep.inverse()),
            }
        }
        let n = self.levels.len();
        (g, n)
    }

    fn check_level(&mut self, l: usize) -> Option<(Permutation, usize)> {
        let gens: Vec<(usize, Permutation)> =
            self.level_gens(l).map(|(i, g)| (i, g.clone())).collect();
        let npts = self.levels[l].orbit.len();
        for a in 0..npts {
            for (gi, g) in &gens {
                let key = (a as u32, *gi as u32);
                if self.levels[l].checked.contains(&key) {
                    continue;
                }
                let lv = &self.levels[l];
                let x = lv.orbit[a];
                let y = g.apply(x);
                let schreier = lv.reps[a].mul(g).mul(&lv.rep_for(y).unwrap().inverse());
                self.levels[l].checked.insert(key);
                if schreier.is_identity() {
                    continue;
                }
                let (h, j) = self.sift_from(schreier, l + 1);
                if !h.is_identity() {
                    return Some((h, j));
                }
            }
        }
        None
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && {
            let (h, j) = self.sift_from(g.clone(), 0);
            j == self.levels.len() && h.is_identity()
        }
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.sgs
    }

    /// Generators of the pointwise stabilizer of the first `l` base points.
    pub fn stabilizer_generators(&self, l: usize) -> Vec<Permutation> {
        self.level_gens(l).map(|(_, g)| g.clone()).collect()
    }

    pub fn basic_orbit(&self, l: usize) -> &[u32] {
        &self.levels[l].orbit
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for lv in self.levels.iter().rev() {
            let i = rng.gen_range(0..lv.reps.len());
            g = g.mul(&lv.reps[i]);
        }
        g
    }

    /// Every element, in a fixed order. Callers bound the order.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = vec![Permutation::identity(self.degree)];
        for lv in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * lv.reps.len());
            for g in &out {
                for r in &lv.reps {
                    next.push(g.mul(r));
                }
            }
            out = next;
        }
        out
    }
}

/// A group given by generators on `{0, …, degree-1}`, with its stabilizer
/// chain built once at construction.
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: StabChain,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("generators", &self.generators.len())
            .field("order", &self.order())
            .finish()
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        Self::with_base_prefix(degree, generators, &[])
    }

    pub fn with_base_prefix(degree: usize, generators: Vec<Permutation>, prefix: &[u32]) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::DegreeCap(degree));
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
        }
        if let Some(&b) = prefix.iter().find(|&&b| b as usize >= degree) {
            return Err(Error::PointOutOfRange(b as usize, degree));
        }
        let chain = StabChain::build(degree, &generators, prefix);
        Ok(PermGroup { degree, generators, chain })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn chain(&self) -> &StabChain {
        &self.chain
    }

    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain.contains(g)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        self.chain.random_element(rng)
    }

    /// All elements sorted by image sequence. Refuses groups above `cap`.
    pub fn elements_sorted(&self, cap: u128) -> Result<Vec<Permutation>> {
        if self.order() > cap {
            return Err(Error::TooLarge(format!("group of order {} exceeds enumeration cap {cap}", self.order())));
        }
        let mut els = self.chain.elements();
        els.sort();
        Ok(els)
    }

    pub fn orbit(&self, point: u32) -> Result<Vec<u32>> {
        if point as usize >= self.degree {
            return Err(Error::PointOutOfRange(point as usize, self.degree));
        }
        Ok(orbit_of(self.degree, &self.generators, point))
    }

    /// All orbits, each sorted, ordered by smallest element.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for x in 0..self.degree as u32 {
            if seen[x as usize] {
                continue;
            }
            let mut o = orbit_of(self.degree, &self.generators, x);
            for &y in &o {
                seen[y as usize] = true;
            }
            o.sort_unstable();
            out.push(o);
        }
        out
    }

    pub fn point_stabilizer(&self, point: u32) -> Result<PermGroup> {
        if point as usize >= self.degree {
            return Err(Error::PointOutOfRange(point as usize, self.degree));
        }
        let chain = if self.chain.base().first() == Some(&point) {
            None
        } else {
            Some(StabChain::build(self.degree, &self.generators, &[point]))
        };
        let gens = chain.as_ref().unwrap_or(&self.chain).stabilizer_generators(1);
        PermGroup::new(self.degree, gens)
    }

    pub fn is_transitive(&self) -> bool {
        orbit_of(self.degree, &self.generators, 0).len() == self.degree
    }

    /// Transitive, and the stabilizer of 0 is transitive on the other points.
    pub fn is_2_transitive(&self) -> bool {
        if self.degree < 2 || !self.is_transitive() {
            return false;
        }
        let stab = match self.point_stabilizer(0) {
            Ok(s) => s,
            Err(_) => return false,
        };
        orbit_of(self.degree, &stab.generators, 1).len() == self.degree - 1
    }

    /// Smallest block containing `a` and `b`, as a class label per point.
    pub fn minimal_block(&self, a: u32, b: u32) -> Vec<u32> {
        let mut parent: Vec<u32> = (0..self.degree as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        let mut queue = vec![(a, b)];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[rb as usize] = ra;
        }
        while let Some((x, y)) = queue.pop() {
            for g in &self.generators {
                let rx = find(&mut parent, g.apply(x));
                let ry = find(&mut parent, g.apply(y));
                if rx != ry {
                    parent[ry as usize] = rx;
                    queue.push((rx, ry));
                }
            }
        }
        (0..self.degree as u32).map(|x| find(&mut parent, x)).collect()
    }

    /// Transitive with no nontrivial block containing 0.
    pub fn is_primitive(&self) -> bool {
        if !self.is_transitive() {
            return false;
        }
        (1..self.degree as u32).all(|b| {
            let cls = self.minimal_block(0, b);
            cls.iter().all(|&c| c == cls[0])
        })
    }

    /// True iff every generator maps every cell onto a cell.
    pub fn is_block_system(&self, partition: &[Vec<u32>]) -> Result<bool> {
        let mut cell_of = vec![usize::MAX; self.degree];
        for (c, cell) in partition.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::MalformedPartition("empty cell".into()));
            }
            for &x in cell {
                let slot = cell_of.get_mut(x as usize).ok_or_else(|| {
                    Error::MalformedPartition(format!("point {x} out of range"))
                })?;
                if *slot != usize::MAX {
                    return Err(Error::MalformedPartition(format!("point {x} in two cells")));
                }
                *slot = c;
            }
        }
        if cell_of.contains(&usize::MAX) {
            return Err(Error::MalformedPartition("partition does not cover the domain".into()));
        }
        Ok(self.generators.iter().all(|g| {
            partition.iter().all(|cell| {
                let target = cell_of[g.apply(cell[0]) as usize];
                cell.iter().all(|&x| cell_of[g.apply(x) as usize] == target)
                    && partition[target].len() == cell.len()
            })
        }))
    }
}

pub fn orbit_of(degree: usize, gens: &[Permutation], point: u32) -> Vec<u32> {
    let mut seen = vec![false; degree];
    seen[point as usize] = true;
    let mut out = vec![point];
    let mut queue = VecDeque::from([point]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y as usize] {
                seen[y as usize] = true;
                out.push(y);
                queue.push_back(y);
            }
        }
    }
    out
}

/// Orbit of `point` with, for each orbit point, a word in the generators
/// (generator indices) carrying `point` to it. BFS order, shortest words.
pub fn orbit_words(gens: &[Permutation], point: u32) -> HashMap<u32, Vec<usize>> {
    let mut words = HashMap::new();
    words.insert(point, Vec::new());
    let mut queue = VecDeque::from([point]);
    while let Some(x) = queue.pop_front() {
        for (i, g) in gens.iter().enumerate() {
            let y = g.apply(x);
            if !words.contains_key(&y) {
                let mut w = words[&x].clone();
                w.push(i);
                words.insert(y, w);
                queue.push_back(y);
            }
        }
    }
    words
}

/// A homomorphism defined by generator images, checked to be well defined.
///
/// The graph `{(g, φ(g))}` is built as a group on `n + m` points. The map
/// extends to a homomorphism iff the graph has the same order as the
/// domain, in which case the chain's base lies in the first `n` points and
/// sifting a domain element through it produces the image.
pub struct Homomorphism {
    domain: PermGroup,
    image: PermGroup,
    graph: StabChain,
    src_degree: usize,
    dst_degree: usize,
}

impl Homomorphism {
    pub fn by_images(domain: PermGroup, images: Vec<Permutation>) -> Result<Self> {
        if domain.generators().len() != images.len() {
            return Err(Error::NotAHomomorphism(format!(
                "{} generators but {} images",
                domain.generators().len(),
                images.len()
            )));
        }
        let n = domain.degree();
        let m = match images.first() {
            Some(h) => h.degree(),
            None => 1,
        };
        if images.iter().any(|h| h.degree() != m) {
            return Err(Error::NotAHomomorphism("image degrees differ".into()));
        }
        let graph_gens: Vec<Permutation> = domain
            .generators()
            .iter()
            .zip(&images)
            .map(|(g, h)| {
                let mut imgs = g.images().to_vec();
                imgs.extend(h.images().iter().map(|&y| y + n as u32));
                Permutation { images: imgs }
            })
            .collect();
        let graph = StabChain::build(n + m, &graph_gens, &[]);
        if graph.order() != domain.order() {
            return Err(Error::NotAHomomorphism(format!(
                "graph order {} differs from domain order {}",
                graph.order(),
                domain.order()
            )));
        }
        let image = PermGroup::new(m, images)?;
        Ok(Homomorphism { domain, image, graph, src_degree: n, dst_degree: m })
    }

    pub fn domain(&self) -> &PermGroup {
        &self.domain
    }

    pub fn image_group(&self) -> &PermGroup {
        &self.image
    }

    /// Image of an arbitrary domain element.
    pub fn apply(&self, g: &Permutation) -> Result<Permutation> {
        if g.degree() != self.src_degree {
            return Err(Error::DegreeMismatch(self.src_degree, g.degree()));
        }
        let mut ext = g.images().to_vec();
        ext.extend((0..self.dst_degree as u32).map(|y| y + self.src_degree as u32));
        let idx = self
            .graph
            .factorize_source(&Permutation { images: ext }, self.src_degree)
            .ok_or(Error::NotInGroup)?;
        let mut img = Permutation::identity(self.dst_degree);
        for (lv, i) in self.graph.levels.iter().zip(idx) {
            let rep = &lv.reps[i];
            let part = Permutation {
                images: rep.images[self.src_degree..].iter().map(|&y| y - self.src_degree as u32).collect(),
            };
            img = part.mul(&img);
        }
        Ok(img)
    }

    /// Order of the kernel, as |domain| / |image|.
    pub fn kernel_order(&self) -> u128 {
        self.domain.order() / self.image.order()
    }
}

impl StabChain {
    // Like `factorize`, but only the first `n` coordinates are compared.
    fn factorize_source(&self, g: &Permutation, n: usize) -> Option<Vec<usize>> {
        let mut src = g.images()[..n].to_vec();
        let mut idx = Vec::with_capacity(self.levels.len());
        for lv in &self.levels {
            if lv.base as usize >= n {
                return None;
            }
            let x = src[lv.base as usize];
            let i = lv.pos[x as usize];
            if i == u32::MAX {
                return None;
            }
            let inv = lv.reps[i as usize].inverse();
            for s in src.iter_mut() {
                *s = inv.apply(*s);
            }
            idx.push(i as usize);
        }
        src.iter().enumerate().all(|(i, &x)| i as u32 == x).then_some(idx)
    }
}

/// Brute-force closure. Test oracle; refuses to grow beyond `cap` elements.
pub fn closure(degree: usize, gens: &[Permutation], cap: usize) -> Option<HashSet<Permutation>> {
    let mut set = HashSet::new();
    let id = Permutation::identity(degree);
    set.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if set.insert(y.clone()) {
                if set.len() > cap {
                    return None;
                }
                queue.push_back(y);
            }
        }
    }
    Some(set)
}
