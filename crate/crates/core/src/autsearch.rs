//! Automorphism group of a graph by individualization and refinement, and the
//! comparison of its order with the subgroup generated by matrix and
//! frame-fixing actions.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::groups::{self, GroupError, Perm, PermGroup};
use crate::linalg::Subspace;
use crate::report::{serialize_big, Check};
use crate::spigraph::{SpiGraph, VertexId};

/// Default cap on the vertex count accepted by [`aut_group`].
pub const MAX_SEARCH_VERTICES: usize = 3000;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("{vertices} vertices exceed the search bound {max}")]
    TooLarge { vertices: usize, max: usize },
    #[error("search produced {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// True iff `sigma` preserves adjacency and loops.
pub fn is_automorphism(g: &SpiGraph, sigma: &Perm) -> bool {
    if sigma.len() != g.len() {
        return false;
    }
    (0..g.len()).all(|u| {
        g.has_loop(u) == g.has_loop(sigma.apply(u))
            && g.degree(u) == g.degree(sigma.apply(u))
            && g.neighbors(u).ones().all(|v| g.is_adjacent(sigma.apply(u), sigma.apply(v)))
    })
}

/// What seeds the first colouring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialInvariant {
    /// Dimension, type, loop flag and degree.
    DimTypeLoopDegree,
    /// Loop flag and degree only: no use of the subspace labels.
    LoopDegree,
}

/// An ordered partition of the vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    cells: Vec<Vec<VertexId>>,
    color: Vec<usize>,
}

impl Coloring {
    /// Cells of equal key, ordered by key, members ascending.
    pub fn from_keys<K: Ord>(n: usize, key: impl Fn(VertexId) -> K) -> Self {
        let mut by_key: BTreeMap<K, Vec<VertexId>> = BTreeMap::new();
        for v in 0..n {
            by_key.entry(key(v)).or_default().push(v);
        }
        Self::from_cells(n, by_key.into_values().collect())
    }

    fn from_cells(n: usize, cells: Vec<Vec<VertexId>>) -> Self {
        let mut color = vec![0; n];
        for (c, cell) in cells.iter().enumerate() {
            for &v in cell {
                color[v] = c;
            }
        }
        Coloring { cells, color }
    }

    pub fn cells(&self) -> &[Vec<VertexId>] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn color(&self, v: VertexId) -> usize {
        self.color[v]
    }

    pub fn is_discrete(&self) -> bool {
        self.cells.len() == self.color.len()
    }

    /// First cell of maximum size among the non-singletons.
    pub fn target_cell(&self) -> Option<usize> {
        let max = self.cells.iter().map(Vec::len).max().filter(|&m| m > 1)?;
        self.cells.iter().position(|c| c.len() == max)
    }

    /// Splits `v` off its cell, placing `{v}` first.
    pub fn individualize(&self, v: VertexId) -> Self {
        let c = self.color[v];
        let mut cells = Vec::with_capacity(self.cells.len() + 1);
        cells.extend_from_slice(&self.cells[..c]);
        cells.push(vec![v]);
        cells.push(self.cells[c].iter().copied().filter(|&u| u != v).collect());
        cells.extend_from_slice(&self.cells[c + 1..]);
        Self::from_cells(self.color.len(), cells)
    }
}

pub fn initial_coloring(g: &SpiGraph) -> Coloring {
    initial_coloring_with(g, InitialInvariant::DimTypeLoopDegree)
}

pub fn initial_coloring_with(g: &SpiGraph, inv: InitialInvariant) -> Coloring {
    match inv {
        InitialInvariant::DimTypeLoopDegree => Coloring::from_keys(g.len(), |v| {
            (g.vertex(v).dim(), g.vertex_type(v), g.has_loop(v), g.degree(v))
        }),
        InitialInvariant::LoopDegree => Coloring::from_keys(g.len(), |v| (g.has_loop(v), g.degree(v))),
    }
}

/// Neighbour counts per cell, as sorted `(cell, count)` pairs.
fn cell_counts(g: &SpiGraph, c: &Coloring, v: VertexId) -> Vec<(usize, usize)> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for u in g.neighbors(v).ones() {
        *counts.entry(c.color[u]).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

/// Coarsest equitable refinement. Each cell splits into sub-cells ordered by
/// the neighbour-count signature, so the result does not depend on labels.
pub fn refine(g: &SpiGraph, c: &Coloring) -> Coloring {
    let mut cur = c.clone();
    loop {
        let mut cells = Vec::with_capacity(cur.cells.len());
        for cell in &cur.cells {
            if cell.len() == 1 {
                cells.push(cell.clone());
                continue;
            }
            let mut parts: BTreeMap<(bool, Vec<(usize, usize)>), Vec<VertexId>> = BTreeMap::new();
            for &v in cell {
                parts.entry((g.has_loop(v), cell_counts(g, &cur, v))).or_default().push(v);
            }
            cells.extend(parts.into_values());
        }
        if cells.len() == cur.cells.len() {
            return cur;
        }
        cur = Coloring::from_cells(g.len(), cells);
    }
}

/// Quotient data of an equitable colouring: per cell its size, loop flag and
/// neighbour counts. Equal along corresponding search paths of isomorphic leaves.
fn quotient(g: &SpiGraph, c: &Coloring) -> Vec<usize> {
    let mut out = Vec::new();
    for cell in &c.cells {
        let v = cell[0];
        out.push(cell.len());
        out.push(usize::from(g.has_loop(v)));
        let counts = cell_counts(g, c, v);
        out.push(counts.len());
        for (cell, n) in counts {
            out.push(cell);
            out.push(n);
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct AutResult {
    pub generators: Vec<Perm>,
    /// Order from Schreier–Sims on the generators.
    #[serde(serialize_with = "serialize_big")]
    pub order: BigUint,
    /// Product of the stabilizer orbit lengths found by the search.
    #[serde(serialize_with = "serialize_big")]
    pub search_order: BigUint,
    pub initial_invariant: InitialInvariant,
    pub nodes: usize,
}

struct Search<'a> {
    g: &'a SpiGraph,
    first: Vec<Coloring>,
    first_q: Vec<Vec<usize>>,
    leaf: Vec<VertexId>,
    nodes: usize,
}

impl Search<'_> {
    /// Looks below `c` (depth `d` of the first path) for a leaf that is the
    /// image of the first leaf under an automorphism.
    fn find(&mut self, c: Coloring, d: usize) -> Option<Perm> {
        self.nodes += 1;
        if quotient(self.g, &c) != self.first_q[d] {
            return None;
        }
        if c.is_discrete() {
            let mut images = vec![0; self.g.len()];
            for (i, cell) in c.cells.iter().enumerate() {
                images[self.leaf[i]] = cell[0];
            }
            let sigma = Perm::from_images(images).expect("discrete colourings give bijections");
            return is_automorphism(self.g, &sigma).then_some(sigma);
        }
        let t = c.target_cell().expect("non-discrete");
        for &u in &c.cells[t].clone() {
            let child = refine(self.g, &c.individualize(u));
            if let Some(s) = self.find(child, d + 1) {
                return Some(s);
            }
        }
        None
    }
}

/// Union-find over vertices, merged along generator cycles.
struct Orbits(Vec<usize>);

impl Orbits {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn absorb(&mut self, p: &Perm) {
        for x in 0..p.len() {
            let (a, b) = (self.find(x), self.find(p.apply(x)));
            if a != b {
                self.0[a.max(b)] = a.min(b);
            }
        }
    }
}

pub fn aut_group(g: &SpiGraph) -> Result<AutResult, SearchError> {
    aut_group_with(g, InitialInvariant::DimTypeLoopDegree, MAX_SEARCH_VERTICES)
}

/// Generators of `Aut(G)`: walk one path to a discrete colouring, then for
/// each level from the bottom up search, for every cell vertex outside the
/// known orbit of the path vertex, for an automorphism mapping one to the other.
pub fn aut_group_with(g: &SpiGraph, inv: InitialInvariant, max_vertices: usize) -> Result<AutResult, SearchError> {
    let n = g.len();
    if n > max_vertices {
        return Err(SearchError::TooLarge { vertices: n, max: max_vertices });
    }
    let mut first = vec![refine(g, &initial_coloring_with(g, inv))];
    let mut path = Vec::new();
    while let Some(t) = first.last().expect("root").target_cell() {
        let c = first.last().expect("root");
        let v = c.cells[t][0];
        path.push((t, v));
        first.push(refine(g, &c.individualize(v)));
    }
    let leaf_coloring = first.last().expect("root");
    let leaf: Vec<VertexId> = leaf_coloring.cells.iter().map(|c| c[0]).collect();
    let first_q = first.iter().map(|c| quotient(g, c)).collect();
    let mut search = Search { g, first: first.clone(), first_q, leaf, nodes: first.len() };

    let mut generators: Vec<Perm> = Vec::new();
    let mut orbits = Orbits((0..n).collect());
    let mut search_order = BigUint::from(1u8);
    for level in (0..path.len()).rev() {
        let (t, v) = path[level];
        let cell = search.first[level].cells[t].clone();
        for &w in &cell {
            if orbits.find(w) == orbits.find(v) {
                continue;
            }
            let child = refine(g, &search.first[level].individualize(w));
            if let Some(sigma) = search.find(child, level + 1) {
                orbits.absorb(&sigma);
                generators.push(sigma);
            }
        }
        let root = orbits.find(v);
        let orbit_len = cell.iter().filter(|&&w| orbits.find(w) == root).count();
        search_order *= BigUint::from(orbit_len);
    }
    let order = groups::group_order(n, &generators)?;
    if order != search_order {
        return Err(SearchError::Inconsistent(format!("orbit product {search_order} but group order {order}")));
    }
    Ok(AutResult { generators, order, search_order, initial_invariant: inv, nodes: search.nodes })
}

/// `(q+1)!` for `ν = 1`, otherwise `q^(2ν) Π_(i=1..ν) (q^(2i) - 1) [F_q : F_p] / 2`.
pub fn formula_order(q: u64, e: u32, nu: usize) -> BigUint {
    if nu == 1 {
        return (1..=q + 1).fold(BigUint::from(1u8), |acc, i| acc * i);
    }
    let qb = BigUint::from(q);
    let mut v = qb.pow(2 * nu as u32);
    for i in 1..=nu as u32 {
        v *= qb.pow(2 * i) - 1u8;
    }
    v * e / 2u8
}

/// `|((F_q^*)^ν ⋊ Aut F_q) / {(s,…,s,1) : s = ±1}|`; the quotient is by a
/// group of order 1 in characteristic 2.
pub fn frame_group_order(q: u64, e: u32, nu: usize) -> BigUint {
    let z = if q % 2 == 0 { 1u8 } else { 2u8 };
    BigUint::from(q - 1).pow(nu as u32) * e / z
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    #[serde(serialize_with = "serialize_big")]
    pub sp_order: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub sp_plus_e_order: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub aut_order: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub formula_value: BigUint,
    pub e_permutations: usize,
    #[serde(serialize_with = "serialize_big")]
    pub e_quotient_order: BigUint,
    pub e_fixes_frame: bool,
    /// Search generators that lie outside `⟨σ_T, σ_(k,π)⟩`.
    pub generators_outside_sp_e: usize,
    pub match_flags: MatchFlags,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MatchFlags {
    pub sp_plus_e_equals_aut: bool,
    pub formula_equals_aut: bool,
    pub sp_divides_aut: bool,
}

/// Vertex ids of `[e_i]` and `[f_i]`.
pub fn frame_vertices(g: &SpiGraph) -> Vec<VertexId> {
    let sp = g.space();
    let f = g.field();
    (0..sp.nu())
        .flat_map(|i| [sp.e(i), sp.f(i)])
        .map(|v| g.vertex_lookup(&Subspace::from_rows(f, sp.dim(), &[v]).expect("unit vector")).expect("point"))
        .collect()
}

pub fn verify_factorization(g: &SpiGraph, aut: &AutResult) -> Result<FactorizationReport, SearchError> {
    let n = g.len();
    let f = g.field();
    let (q, e, nu) = (u64::from(f.order()), f.e(), g.nu());
    if let Some(i) = aut.generators.iter().position(|p| !is_automorphism(g, p)) {
        return Err(GroupError::NotAutomorphism(i).into());
    }
    let sp_gens = groups::transvection_perms(g)?;
    let e_gens = groups::descriptor_perms(g)?;
    if let Some(i) = sp_gens.iter().chain(&e_gens).position(|p| !is_automorphism(g, p)) {
        return Err(GroupError::NotAutomorphism(i).into());
    }
    let sp_order = groups::group_order(n, &sp_gens)?;
    let mut all = sp_gens.clone();
    all.extend(e_gens.iter().cloned());
    let sp_e = PermGroup::new(n, &all)?;
    let sp_plus_e_order = sp_e.order();
    let aut_order = aut.order.clone();
    let formula_value = formula_order(q, e, nu);
    let frame = frame_vertices(g);
    let e_fixes_frame = e_gens.iter().all(|p| frame.iter().all(|&x| p.apply(x) == x));
    let e_quotient_order = frame_group_order(q, e, nu);
    let generators_outside_sp_e = aut.generators.iter().filter(|p| !sp_e.contains(p)).count();
    let zero = BigUint::from(0u8);
    let flags = MatchFlags {
        sp_plus_e_equals_aut: sp_plus_e_order == aut_order,
        formula_equals_aut: formula_value == aut_order,
        sp_divides_aut: &aut_order % &sp_order == zero,
    };

    let mut checks = vec![
        Check::new("generators-are-automorphisms", true, format!("{} search generators", aut.generators.len())),
        Check::new("sp-order-divides-aut", flags.sp_divides_aut, format!("|Sp image| = {sp_order}, |Aut| = {aut_order}")),
        Check::new("e-fixes-frame", e_fixes_frame, format!("{} distinct frame-fixing permutations", e_gens.len())),
        Check::new(
            "e-count-matches-quotient",
            BigUint::from(e_gens.len()) == e_quotient_order,
            format!("{} permutations, quotient order {e_quotient_order}", e_gens.len()),
        ),
    ];
    if nu == 1 {
        checks.push(Check::new(
            "aut-is-symmetric-group",
            flags.formula_equals_aut,
            format!("|Aut| = {aut_order}, (q+1)! = {formula_value}"),
        ));
        checks.push(Check::not_applicable(
            "sp-e-generate-aut",
            format!("ν = 1 has no edges; ⟨σ_T, σ_(k,π)⟩ has order {sp_plus_e_order}"),
        ));
    } else {
        checks.push(Check::new(
            "sp-e-generate-aut",
            flags.sp_plus_e_equals_aut,
            format!(
                "|⟨σ_T, σ_(k,π)⟩| = {sp_plus_e_order}, |Aut| = {aut_order}, {generators_outside_sp_e} search generators outside"
            ),
        ));
        checks.push(Check::reported(
            "order-formula",
            format!(
                "formula {formula_value} vs computed {aut_order}: {}",
                if flags.formula_equals_aut { "match" } else { "mismatch" }
            ),
        ));
    }
    let part = groups::vertex_orbits(g, &aut.generators)?;
    checks.push(Check::new(
        "aut-orbits-are-type-classes",
        groups::partition_matches(&part, |v| g.vertex_type(v)),
        format!("{} orbits", part.len()),
    ));

    Ok(FactorizationReport {
        sp_order,
        sp_plus_e_order,
        aut_order,
        formula_value,
        e_permutations: e_gens.len(),
        e_quotient_order,
        e_fixes_frame,
        generators_outside_sp_e,
        match_flags: flags,
        checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AutReport {
    #[serde(serialize_with = "serialize_big")]
    pub order: BigUint,
    pub num_generators: usize,
    pub generators: Vec<Perm>,
    pub initial_invariant: InitialInvariant,
    pub comparisons: FactorizationReport,
}

pub fn aut_report(g: &SpiGraph) -> Result<AutReport, SearchError> {
    let aut = aut_group(g)?;
    let comparisons = verify_factorization(g, &aut)?;
    Ok(AutReport {
        order: aut.order.clone(),
        num_generators: aut.generators.len(),
        initial_invariant: aut.initial_invariant,
        generators: aut.generators,
        comparisons,
    })
}
