//! Construction of `Spi(2ν, q)`.
//!
//! Vertices are all subspaces of dimension `1..2ν-1`, ordered by dimension,
//! then pivot-column set, then free entries (by element code, first entry
//! most significant). Loops are kept apart from the simple adjacency: the
//! degree of a vertex counts non-loop neighbours only.

use std::collections::HashMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use thiserror::Error;

use crate::gf::{FieldElem, FieldError, FieldSpec};
use crate::linalg::{LinalgError, Matrix, Subspace};
use crate::symplectic::{SymplecticError, SympSpace, SympType};

pub mod cache;

pub type VertexId = usize;

/// Default cap on the ambient dimension `2ν`.
pub const DEFAULT_MAX_AMBIENT: usize = 8;
/// Default cap on the vertex count (adjacency is stored densely).
pub const DEFAULT_MAX_VERTICES: u64 = 20_000;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("ambient dimension {dim} exceeds the configured bound {max}")]
    AmbientTooLarge { dim: usize, max: usize },
    #[error("graph would have {count} vertices, above the configured bound {max}")]
    TooManyVertices { count: u64, max: u64 },
    #[error("subspace of dimension {dim} is not a vertex (trivial subspace)")]
    TrivialSubspace { dim: usize },
    #[error("subspace has ambient dimension {got}, expected {expected}")]
    AmbientMismatch { expected: usize, got: usize },
    #[error("subspace {0} not found among the vertices")]
    NotFound(String),
    #[error("cache error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphLimits {
    pub max_ambient: usize,
    pub max_vertices: u64,
}

impl Default for GraphLimits {
    fn default() -> Self {
        GraphLimits { max_ambient: DEFAULT_MAX_AMBIENT, max_vertices: DEFAULT_MAX_VERTICES }
    }
}

/// An unordered edge with `u <= v`; `u == v` is a loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
}

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        Edge { u: a.min(b), v: a.max(b) }
    }

    pub fn is_loop(self) -> bool {
        self.u == self.v
    }
}

/// Gaussian binomial coefficient `[n choose k]_q`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= u128::from(q).pow(n - i) - 1;
        den *= u128::from(q).pow(i + 1) - 1;
    }
    (num / den) as u64
}

/// `Σ_{m=1}^{n-1} [n choose m]_q`.
pub fn nontrivial_subspace_count(n: u32, q: u64) -> u64 {
    (1..n).map(|m| gaussian_binomial(n, m, q)).sum()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All subspaces of `F_q^n` of dimension `m`, in canonical order.
pub fn subspaces_of_dim(f: &FieldSpec, n: usize, m: usize) -> Vec<Subspace> {
    let q = f.order() as usize;
    let mut out = Vec::new();
    for pivots in combinations(n, m) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(r, &pc)| ((pc + 1)..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
            .collect();
        let total = q.pow(free.len() as u32);
        for idx in 0..total {
            let mut mat = Matrix::zeros(m, n);
            for (r, &pc) in pivots.iter().enumerate() {
                mat.set(r, pc, FieldElem::ONE);
            }
            let mut rem = idx;
            for &(r, c) in free.iter().rev() {
                mat.set(r, c, FieldElem((rem % q) as u16));
                rem /= q;
            }
            out.push(Subspace::from_rref_unchecked(mat));
        }
    }
    out
}

/// Every nontrivial subspace of the symplectic space, in vertex order.
pub fn enumerate_subspaces(sp: &SympSpace, limits: &GraphLimits) -> Result<Vec<Subspace>, GraphError> {
    let n = sp.dim();
    if n > limits.max_ambient {
        return Err(GraphError::AmbientTooLarge { dim: n, max: limits.max_ambient });
    }
    let count = nontrivial_subspace_count(n as u32, u64::from(sp.field().order()));
    if count > limits.max_vertices {
        return Err(GraphError::TooManyVertices { count, max: limits.max_vertices });
    }
    Ok((1..n).flat_map(|m| subspaces_of_dim(sp.field(), n, m)).collect())
}

#[derive(Clone, Debug)]
pub struct SpiGraph {
    space: SympSpace,
    vertices: Vec<Subspace>,
    index: HashMap<Subspace, VertexId>,
    adjacency: Vec<FixedBitSet>,
    loops: FixedBitSet,
    types: Vec<SympType>,
}

impl PartialEq for SpiGraph {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.vertices == other.vertices
            && self.adjacency == other.adjacency
            && self.loops == other.loops
            && self.types == other.types
    }
}

impl SpiGraph {
    pub fn build(sp: SympSpace) -> Result<Self, GraphError> {
        Self::build_with_limits(sp, &GraphLimits::default())
    }

    pub fn build_with_limits(sp: SympSpace, limits: &GraphLimits) -> Result<Self, GraphError> {
        let vertices = enumerate_subspaces(&sp, limits)?;
        let n = vertices.len();
        let types = vertices
            .par_iter()
            .map(|v| sp.type_of(v))
            .collect::<Result<Vec<_>, _>>()?;

        // rows of A K, so that A K tB is a matrix of plain dot products
        let f = sp.field();
        let ak: Vec<Matrix> = vertices
            .par_iter()
            .map(|v| v.basis().mul(f, sp.gram()).expect("basis has 2ν columns"))
            .collect();
        let adjacency: Vec<FixedBitSet> = (0..n)
            .into_par_iter()
            .map(|u| {
                let mut row = FixedBitSet::with_capacity(n);
                for v in 0..n {
                    if v != u && product_vanishes(f, &ak[u], vertices[v].basis()) {
                        row.insert(v);
                    }
                }
                row
            })
            .collect();
        let mut loops = FixedBitSet::with_capacity(n);
        for (i, v) in vertices.iter().enumerate() {
            if product_vanishes(f, &ak[i], v.basis()) {
                loops.insert(i);
            }
        }
        Ok(Self::from_parts(sp, vertices, adjacency, loops, types))
    }

    pub(crate) fn from_parts(
        space: SympSpace,
        vertices: Vec<Subspace>,
        adjacency: Vec<FixedBitSet>,
        loops: FixedBitSet,
        types: Vec<SympType>,
    ) -> Self {
        let index = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        SpiGraph { space, vertices, index, adjacency, loops, types }
    }

    pub fn space(&self) -> &SympSpace {
        &self.space
    }

    pub fn field(&self) -> &FieldSpec {
        self.space.field()
    }

    pub fn nu(&self) -> usize {
        self.space.nu()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Subspace] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Subspace {
        &self.vertices[v]
    }

    pub fn vertex_type(&self, v: VertexId) -> SympType {
        self.types[v]
    }

    pub fn types(&self) -> &[SympType] {
        &self.types
    }

    pub fn adjacency(&self) -> &[FixedBitSet] {
        &self.adjacency
    }

    pub fn neighbors(&self, v: VertexId) -> &FixedBitSet {
        &self.adjacency[v]
    }

    pub fn is_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency[u].contains(v)
    }

    pub fn loops(&self) -> &FixedBitSet {
        &self.loops
    }

    pub fn has_loop(&self, v: VertexId) -> bool {
        self.loops.contains(v)
    }

    /// Non-loop degree.
    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    pub fn loop_count(&self) -> usize {
        self.loops.count_ones(..)
    }

    /// All edges `u <= v`, loops included, in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for u in 0..self.len() {
            if self.has_loop(u) {
                out.push(Edge { u, v: u });
            }
            out.extend(self.adjacency[u].ones().filter(|&v| v > u).map(|v| Edge { u, v }));
        }
        out
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        if e.is_loop() {
            self.has_loop(e.u)
        } else {
            self.is_adjacent(e.u, e.v)
        }
    }

    pub fn vertex_lookup(&self, p: &Subspace) -> Result<VertexId, GraphError> {
        if p.ambient() != self.space.dim() {
            return Err(GraphError::AmbientMismatch { expected: self.space.dim(), got: p.ambient() });
        }
        if p.is_trivial() {
            return Err(GraphError::TrivialSubspace { dim: p.dim() });
        }
        self.index.get(p).copied().ok_or_else(|| GraphError::NotFound(p.to_string()))
    }

    /// The induced subgraph on the 1-dimensional vertices.
    pub fn point_subgraph(&self) -> PointSubgraph {
        let ids: Vec<VertexId> = (0..self.len()).filter(|&v| self.vertices[v].dim() == 1).collect();
        let local: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adjacency = ids
            .iter()
            .map(|&v| {
                let mut row = FixedBitSet::with_capacity(ids.len());
                for w in self.adjacency[v].ones() {
                    if let Some(&j) = local.get(&w) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        PointSubgraph { ids, adjacency }
    }

    /// DOT rendering; loops appear as self-edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let q = self.field().order();
        writeln!(out, "graph spi_{}_{} {{", 2 * self.nu(), q).unwrap();
        for (i, v) in self.vertices.iter().enumerate() {
            let t = self.types[i];
            writeln!(out, "  v{i} [label=\"d{}t({},{})#{i}\"];", v.dim(), t.m, t.s).unwrap();
        }
        for e in self.edges() {
            writeln!(out, "  v{} -- v{};", e.u, e.v).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn product_vanishes(f: &FieldSpec, ak: &Matrix, b: &Matrix) -> bool {
    ak.row_iter().all(|x| {
        b.row_iter().all(|y| {
            x.iter()
                .zip(y)
                .fold(FieldElem::ZERO, |acc, (&s, &t)| f.add(acc, f.mul(s, t)))
                .is_zero()
        })
    })
}

/// Induced subgraph on the points, indexed locally `0..ids.len()`.
#[derive(Clone, Debug)]
pub struct PointSubgraph {
    pub ids: Vec<VertexId>,
    pub adjacency: Vec<FixedBitSet>,
}

impl PointSubgraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}
