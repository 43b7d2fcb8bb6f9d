//! Permutations of the vertex set, Schreier–Sims orders, and orbit partitions
//! with witness words.
//!
//! Permutations act on the left of an index (`p.apply(x)`) and compose left to
//! right: `a.then(&b)` applies `a` first. A witness word is a list of generator
//! indices applied in order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::autsearch::is_automorphism;
use crate::linalg::LinalgError;
use crate::report::serialize_big;
use crate::spigraph::{Edge, GraphError, SpiGraph};
use crate::symplectic::{AutDescriptor, SympMatrix, SympType, SymplecticError};

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("image list is not a bijection")]
    NotBijective,
    #[error("permutation on {got} points, expected {expected}")]
    DomainMismatch { expected: usize, got: usize },
    #[error("generator {0} is not an automorphism")]
    NotAutomorphism(usize),
    #[error("{0} and {1} lie in different orbits")]
    DifferentOrbits(usize, usize),
    #[error("generator {index} has order {order}, too large to invert by powering")]
    OrderTooLarge { index: usize, order: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Perm {
    images: Vec<usize>,
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(GroupError::NotBijective);
            }
        }
        Ok(Perm { images })
    }

    /// Swaps `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Perm::identity(n);
        p.images.swap(a, b);
        p
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm { images: self.images.iter().map(|&x| other.images[x]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Perm { images: inv }
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|(i, x)| i != *x).map(|(i, _)| i)
    }

    /// Lcm of the cycle lengths.
    pub fn order(&self) -> BigUint {
        let mut seen = vec![false; self.len()];
        let mut lens = HashSet::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0u64;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            lens.insert(len);
        }
        lens.into_iter().fold(BigUint::from(1u8), |acc, l| num_integer_lcm(&acc, &BigUint::from(l)))
    }
}

fn num_integer_lcm(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut x, mut y) = (a.clone(), b.clone());
    while y != BigUint::from(0u8) {
        let r = &x % &y;
        x = y;
        y = r;
    }
    a / x * b
}

fn check_domain(n: usize, gens: &[Perm]) -> Result<(), GroupError> {
    match gens.iter().find(|g| g.len() != n) {
        Some(g) => Err(GroupError::DomainMismatch { expected: n, got: g.len() }),
        None => Ok(()),
    }
}

/// `σ_T : A ↦ AT` as a vertex permutation.
pub fn perm_from_matrix(g: &SpiGraph, t: &SympMatrix) -> Result<Perm, GroupError> {
    let sp = g.space();
    let images = (0..g.len())
        .into_par_iter()
        .map(|v| Ok(g.vertex_lookup(&sp.act_matrix(t, g.vertex(v))?)?))
        .collect::<Result<Vec<_>, GroupError>>()?;
    Perm::from_images(images)
}

/// `σ_(k, π)` (optionally composed with `σ_T`) as a vertex permutation.
pub fn perm_from_descriptor(g: &SpiGraph, d: &AutDescriptor) -> Result<Perm, GroupError> {
    let sp = g.space();
    sp.check_descriptor(d)?;
    let images = (0..g.len())
        .into_par_iter()
        .map(|v| Ok(g.vertex_lookup(&sp.act_descriptor(d, g.vertex(v))?)?))
        .collect::<Result<Vec<_>, GroupError>>()?;
    Perm::from_images(images)
}

pub fn transvection_perms(g: &SpiGraph) -> Result<Vec<Perm>, GroupError> {
    g.space().transvections().iter().map(|t| perm_from_matrix(g, t)).collect()
}

/// Every `σ_(k, π)` of the frame-fixing group, deduplicated, in enumeration order.
pub fn descriptor_perms(g: &SpiGraph) -> Result<Vec<Perm>, GroupError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for d in g.space().scaling_descriptors() {
        let p = perm_from_descriptor(g, &d)?;
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    Ok(out)
}

/// One level of a stabilizer chain: a base point, the strong generators fixing
/// every earlier base point, and a Schreier vector for the basic orbit.
#[derive(Clone, Debug)]
struct Level {
    base: usize,
    gens: Vec<usize>,
    /// Orbit point -> index into `gens` of the label on the tree edge into it;
    /// `usize::MAX` marks the root.
    tree: HashMap<usize, usize>,
    orbit: Vec<usize>,
}

const ROOT: usize = usize::MAX;

/// A permutation group with a base and strong generating set computed by
/// deterministic Schreier–Sims.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    strong: Vec<Perm>,
    strong_inv: Vec<Perm>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn new(degree: usize, gens: &[Perm]) -> Result<Self, GroupError> {
        check_domain(degree, gens)?;
        for g in gens {
            Perm::from_images(g.images.clone())?;
        }
        let mut grp = PermGroup {
            degree,
            generators: gens.to_vec(),
            strong: Vec::new(),
            strong_inv: Vec::new(),
            levels: Vec::new(),
        };
        for g in gens.iter().filter(|g| !g.is_identity()) {
            grp.add_strong(g.clone(), 0);
        }
        grp.schreier_sims();
        Ok(grp)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn strong_generators(&self) -> &[Perm] {
        &self.strong
    }

    pub fn basic_orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u8), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, p: &Perm) -> bool {
        p.len() == self.degree && self.sift(p.clone(), 0).1.is_identity()
    }

    /// Adds `h` to every level from `from` on, extending the base if `h` fixes it.
    fn add_strong(&mut self, h: Perm, from: usize) {
        let idx = self.strong.len();
        self.strong_inv.push(h.inverse());
        self.strong.push(h);
        let h = &self.strong[idx];
        if self.levels.iter().all(|l| h.apply(l.base) == l.base) {
            let b = h.first_moved().expect("non-identity");
            self.levels.push(Level { base: b, gens: Vec::new(), tree: HashMap::new(), orbit: Vec::new() });
        }
        for l in from..self.levels.len() {
            self.levels[l].gens.push(idx);
            self.rebuild_orbit(l);
            // h fixes the base points of earlier levels only up to its first moved one
            if self.strong[idx].apply(self.levels[l].base) != self.levels[l].base {
                break;
            }
        }
    }

    fn rebuild_orbit(&mut self, l: usize) {
        let level = &mut self.levels[l];
        level.tree.clear();
        level.tree.insert(level.base, ROOT);
        level.orbit = vec![level.base];
        let mut i = 0;
        while i < level.orbit.len() {
            let x = level.orbit[i];
            for (j, &s) in level.gens.iter().enumerate() {
                let y = self.strong[s].apply(x);
                if let std::collections::hash_map::Entry::Vacant(e) = level.tree.entry(y) {
                    e.insert(j);
                    level.orbit.push(y);
                }
            }
            i += 1;
        }
    }

    /// `u_x` with `u_x(base) = x`, from the Schreier vector.
    fn transversal(&self, l: usize, x: usize) -> Perm {
        let level = &self.levels[l];
        let mut labels = Vec::new();
        let mut y = x;
        loop {
            let j = level.tree[&y];
            if j == ROOT {
                break;
            }
            let s = level.gens[j];
            labels.push(s);
            y = self.strong_inv[s].apply(y);
        }
        let mut u = Perm::identity(self.degree);
        for &s in labels.iter().rev() {
            u = u.then(&self.strong[s]);
        }
        u
    }

    /// Strips `g` through the chain from level `from`; returns the level where
    /// it stopped (`levels.len()` when it passed every level) and the residue.
    fn sift(&self, mut g: Perm, from: usize) -> (usize, Perm) {
        for l in from..self.levels.len() {
            let y = g.apply(self.levels[l].base);
            if !self.levels[l].tree.contains_key(&y) {
                return (l, g);
            }
            g = g.then(&self.transversal(l, y).inverse());
        }
        (self.levels.len(), g)
    }

    fn schreier_sims(&mut self) {
        // (orbit point, strong generator) pairs whose Schreier generator is known to sift
        let mut checked: Vec<HashSet<(usize, usize)>> = Vec::new();
        let mut i = self.levels.len();
        while i > 0 {
            let l = i - 1;
            checked.resize_with(self.levels.len(), HashSet::new);
            let mut restarted = false;
            'scan: for oi in 0..self.levels[l].orbit.len() {
                let x = self.levels[l].orbit[oi];
                for gi in 0..self.levels[l].gens.len() {
                    let s = self.levels[l].gens[gi];
                    if checked[l].contains(&(x, s)) {
                        continue;
                    }
                    let ux = self.transversal(l, x);
                    let sx = self.strong[s].apply(x);
                    let schreier = ux.then(&self.strong[s]).then(&self.transversal(l, sx).inverse());
                    let (j, h) = self.sift(schreier, l + 1);
                    if h.is_identity() {
                        checked[l].insert((x, s));
                        continue;
                    }
                    self.add_strong(h, l + 1);
                    // deeper transversals changed, so their checks are stale
                    checked.truncate(l + 1);
                    // the new generator lives at levels l+1..=j; resume from the deepest
                    i = (j + 1).min(self.levels.len());
                    restarted = true;
                    break 'scan;
                }
            }
            if !restarted {
                i -= 1;
            }
        }
    }
}

/// Exact order of `⟨gens⟩` on `degree` points.
pub fn group_order(degree: usize, gens: &[Perm]) -> Result<BigUint, GroupError> {
    Ok(PermGroup::new(degree, gens)?.order())
}

/// Orbits of a group on `0..n`, with a Schreier tree per class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub class_of: Vec<usize>,
    /// Least element of each class; classes are ordered by representative.
    pub representatives: Vec<usize>,
    pub sizes: Vec<usize>,
    /// `x -> (parent, generator)` with `x = gens[generator](parent)`; `None` at representatives.
    pub parent: Vec<Option<(usize, usize)>>,
}

impl OrbitPartition {
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn same_class(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    /// Class members, each sorted, in class order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    /// Word mapping the representative of `x`'s class to `x`.
    pub fn word_from_representative(&self, x: usize) -> Vec<usize> {
        let mut word = Vec::new();
        let mut y = x;
        while let Some((p, g)) = self.parent[y] {
            word.push(g);
            y = p;
        }
        word.reverse();
        word
    }
}

/// BFS closure of every point under `gens`.
pub fn orbits(n: usize, gens: &[Perm]) -> Result<OrbitPartition, GroupError> {
    check_domain(n, gens)?;
    let mut class_of = vec![usize::MAX; n];
    let mut parent = vec![None; n];
    let mut representatives = Vec::new();
    let mut sizes = Vec::new();
    for r in 0..n {
        if class_of[r] != usize::MAX {
            continue;
        }
        let c = representatives.len();
        representatives.push(r);
        class_of[r] = c;
        let mut size = 1;
        let mut frontier = vec![r];
        while !frontier.is_empty() {
            let images: Vec<Vec<(usize, usize, usize)>> = frontier
                .par_iter()
                .map(|&x| gens.iter().enumerate().map(|(j, g)| (g.apply(x), x, j)).collect())
                .collect();
            let mut next = Vec::new();
            for (y, x, j) in images.into_iter().flatten() {
                if class_of[y] == usize::MAX {
                    class_of[y] = c;
                    parent[y] = Some((x, j));
                    next.push(y);
                    size += 1;
                }
            }
            frontier = next;
        }
        sizes.push(size);
    }
    Ok(OrbitPartition { class_of, representatives, sizes, parent })
}

pub fn vertex_orbits(g: &SpiGraph, gens: &[Perm]) -> Result<OrbitPartition, GroupError> {
    orbits(g.len(), gens)
}

/// Applies `word` to `x`.
pub fn replay(gens: &[Perm], word: &[usize], x: usize) -> usize {
    word.iter().fold(x, |y, &j| gens[j].apply(y))
}

/// Cap on a generator order when an inverse is spelled as a power.
pub const MAX_INVERSE_POWER: u64 = 1 << 16;

/// A word mapping `a` to `b`, using only the generators themselves: the
/// inverse of `g` is written as `g^(ord g - 1)`.
pub fn witness_word(part: &OrbitPartition, gens: &[Perm], a: usize, b: usize) -> Result<Vec<usize>, GroupError> {
    if !part.same_class(a, b) {
        return Err(GroupError::DifferentOrbits(a, b));
    }
    if a == b {
        return Ok(Vec::new());
    }
    let to_a = part.word_from_representative(a);
    let mut word = Vec::new();
    for &j in to_a.iter().rev() {
        let ord = u64::try_from(gens[j].order()).unwrap_or(u64::MAX);
        if ord > MAX_INVERSE_POWER {
            return Err(GroupError::OrderTooLarge { index: j, order: ord });
        }
        word.extend(std::iter::repeat_n(j, ord as usize - 1));
    }
    word.extend(part.word_from_representative(b));
    Ok(word)
}

/// The complete edge-orbit invariant: endpoint types in sorted order and the
/// type of the sum. A loop has `low = high = sum`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeTriple {
    pub low: SympType,
    pub high: SympType,
    pub sum: SympType,
}

impl fmt::Display for EdgeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.low, self.high, self.sum)
    }
}

pub fn edge_triple(g: &SpiGraph, e: Edge) -> Result<EdgeTriple, GroupError> {
    let (a, b) = (g.vertex_type(e.u), g.vertex_type(e.v));
    let sum = if e.is_loop() {
        a
    } else {
        let f = g.field();
        g.space().type_of(&g.vertex(e.u).sum(f, g.vertex(e.v))?)?
    };
    Ok(EdgeTriple { low: a.min(b), high: a.max(b), sum })
}

/// Orbits on the edge set (loops included) of the group generated by vertex automorphisms.
#[derive(Clone, Debug)]
pub struct EdgeOrbits {
    pub edges: Vec<Edge>,
    /// The generators acting on edge indices.
    pub edge_perms: Vec<Perm>,
    pub partition: OrbitPartition,
}

impl EdgeOrbits {
    pub fn index_of(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    /// Word mapping edge `a` to edge `b` as unordered pairs.
    pub fn witness(&self, a: Edge, b: Edge) -> Result<Vec<usize>, GroupError> {
        let ia = self.index_of(a).ok_or(GraphError::NotFound(format!("{a:?}")))?;
        let ib = self.index_of(b).ok_or(GraphError::NotFound(format!("{b:?}")))?;
        witness_word(&self.partition, &self.edge_perms, ia, ib)
    }
}

/// Replays a vertex word on an unordered edge.
pub fn replay_edge(gens: &[Perm], word: &[usize], e: Edge) -> Edge {
    Edge::new(replay(gens, word, e.u), replay(gens, word, e.v))
}

pub fn edge_orbits(g: &SpiGraph, gens: &[Perm]) -> Result<EdgeOrbits, GroupError> {
    check_domain(g.len(), gens)?;
    if let Some(i) = gens.iter().position(|p| !is_automorphism(g, p)) {
        return Err(GroupError::NotAutomorphism(i));
    }
    let edges = g.edges();
    let index: HashMap<Edge, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let edge_perms: Vec<Perm> = gens
        .par_iter()
        .map(|p| Perm { images: edges.iter().map(|&e| index[&Edge::new(p.apply(e.u), p.apply(e.v))]).collect() })
        .collect();
    let partition = orbits(edges.len(), &edge_perms)?;
    Ok(EdgeOrbits { edges, edge_perms, partition })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitClass {
    pub representative: String,
    pub size: usize,
    pub invariant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessEntry>,
}

/// A word taking the representative to the largest class member.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessEntry {
    pub target: String,
    pub word: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub kind: &'static str,
    pub num_generators: usize,
    #[serde(serialize_with = "serialize_big")]
    pub group_order: BigUint,
    pub classes: Vec<OrbitClass>,
    /// Whether the orbits coincide with the classes of the invariant.
    pub matches_invariant: bool,
}

/// Partition equality: `x ~ y` in `part` iff `key(x) == key(y)`.
pub fn partition_matches<K: Ord>(part: &OrbitPartition, key: impl Fn(usize) -> K) -> bool {
    let mut class_key: BTreeMap<K, usize> = BTreeMap::new();
    let mut seen_class = vec![false; part.len()];
    for x in 0..part.class_of.len() {
        let c = part.class_of[x];
        match class_key.get(&key(x)) {
            Some(&c2) if c2 != c => return false,
            Some(_) => {}
            None => {
                if seen_class[c] {
                    return false;
                }
                class_key.insert(key(x), c);
            }
        }
        seen_class[c] = true;
    }
    true
}

pub fn vertex_orbit_report(g: &SpiGraph, gens: &[Perm], witnesses: bool) -> Result<OrbitReport, GroupError> {
    let part = vertex_orbits(g, gens)?;
    let mut classes = Vec::new();
    for (c, members) in part.classes().into_iter().enumerate() {
        let rep = part.representatives[c];
        let last = *members.last().expect("nonempty class");
        let witness = if witnesses {
            Some(WitnessEntry { target: g.vertex(last).to_string(), word: witness_word(&part, gens, rep, last)? })
        } else {
            None
        };
        classes.push(OrbitClass {
            representative: g.vertex(rep).to_string(),
            size: part.sizes[c],
            invariant: g.vertex_type(rep).to_string(),
            witness,
        });
    }
    Ok(OrbitReport {
        kind: "vertex",
        num_generators: gens.len(),
        group_order: group_order(g.len(), gens)?,
        matches_invariant: partition_matches(&part, |v| g.vertex_type(v)),
        classes,
    })
}

pub fn edge_orbit_report(g: &SpiGraph, gens: &[Perm], witnesses: bool) -> Result<OrbitReport, GroupError> {
    let eo = edge_orbits(g, gens)?;
    let triples = eo.edges.iter().map(|&e| edge_triple(g, e)).collect::<Result<Vec<_>, _>>()?;
    let text = |e: Edge| format!("{} -- {}", g.vertex(e.u), g.vertex(e.v));
    let mut classes = Vec::new();
    for (c, members) in eo.partition.classes().into_iter().enumerate() {
        let rep = eo.partition.representatives[c];
        let last = *members.last().expect("nonempty class");
        let witness = if witnesses {
            Some(WitnessEntry {
                target: text(eo.edges[last]),
                word: witness_word(&eo.partition, &eo.edge_perms, rep, last)?,
            })
        } else {
            None
        };
        classes.push(OrbitClass {
            representative: text(eo.edges[rep]),
            size: eo.partition.sizes[c],
            invariant: triples[rep].to_string(),
            witness,
        });
    }
    Ok(OrbitReport {
        kind: "edge",
        num_generators: gens.len(),
        group_order: group_order(g.len(), gens)?,
        matches_invariant: partition_matches(&eo.partition, |i| triples[i]),
        classes,
    })
}
