//! Connectivity, distances, degrees, cliques and the type census of a graph.
//!
//! Distances ignore loops. All results are deterministic: ties are broken by
//! the lowest vertex id.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gf::prime_power;
use crate::linalg::Subspace;
use crate::report::Check;
use crate::spigraph::{gaussian_binomial, SpiGraph, VertexId};
use crate::symplectic::SympType;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("no (ν, q) with {points} points and clique number {clique}")]
    NoSolution { points: u64, clique: u64 },
    #[error("(ν, q) is ambiguous for {points} points and clique number {clique}")]
    Ambiguous { points: u64, clique: u64 },
}

/// Connected components of the loop-free graph, each sorted, ordered by least element.
pub fn components(g: &SpiGraph) -> Vec<Vec<VertexId>> {
    let n = g.len();
    let mut seen = FixedBitSet::with_capacity(n);
    let mut out = Vec::new();
    for s in 0..n {
        if seen.contains(s) {
            continue;
        }
        seen.insert(s);
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            for w in g.neighbors(v).ones() {
                if !seen.put(w) {
                    comp.push(w);
                }
            }
            i += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// BFS layers from `source`, as bitsets.
fn bfs_layers(adj: &[FixedBitSet], source: usize) -> Vec<FixedBitSet> {
    let n = adj.len();
    let mut visited = FixedBitSet::with_capacity(n);
    visited.insert(source);
    let mut frontier = FixedBitSet::with_capacity(n);
    frontier.insert(source);
    let mut layers = vec![frontier.clone()];
    loop {
        let mut next = FixedBitSet::with_capacity(n);
        for v in frontier.ones() {
            next.union_with(&adj[v]);
        }
        next.difference_with(&visited);
        if next.is_clear() {
            return layers;
        }
        visited.union_with(&next);
        layers.push(next.clone());
        frontier = next;
    }
}

/// Eccentricity of `source`, or `None` when some vertex is unreachable.
fn eccentricity(adj: &[FixedBitSet], source: usize) -> Option<usize> {
    let layers = bfs_layers(adj, source);
    let reached: usize = layers.iter().map(|l| l.count_ones(..)).sum();
    (reached == adj.len()).then(|| layers.len() - 1)
}

pub fn distance(g: &SpiGraph, a: VertexId, b: VertexId) -> Option<usize> {
    bfs_layers(g.adjacency(), a).iter().position(|l| l.contains(b))
}

/// A shortest path from `a` to `b`, choosing the lowest-id predecessor at each step.
pub fn shortest_path(g: &SpiGraph, a: VertexId, b: VertexId) -> Option<Vec<VertexId>> {
    let layers = bfs_layers(g.adjacency(), a);
    let d = layers.iter().position(|l| l.contains(b))?;
    let mut path = vec![b];
    let mut cur = b;
    for level in (0..d).rev() {
        let mut cand = g.neighbors(cur).clone();
        cand.intersect_with(&layers[level]);
        cur = cand.ones().next().expect("BFS layers are consistent");
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceReport {
    pub connected: bool,
    /// `None` when the graph is disconnected.
    pub diameter: Option<usize>,
    pub witness_pair: (VertexId, VertexId),
    pub witness_path: Vec<VertexId>,
    /// Eccentricity -> number of vertices; empty for disconnected graphs.
    pub eccentricity_histogram: BTreeMap<usize, usize>,
}

/// Exact diameter by BFS from every vertex.
pub fn diameter(g: &SpiGraph) -> DistanceReport {
    let adj = g.adjacency();
    let n = g.len();
    let ecc: Vec<Option<usize>> = (0..n).into_par_iter().map(|s| eccentricity(adj, s)).collect();
    if n == 0 {
        return DistanceReport {
            connected: true,
            diameter: Some(0),
            witness_pair: (0, 0),
            witness_path: vec![],
            eccentricity_histogram: BTreeMap::new(),
        };
    }
    if ecc.iter().any(Option::is_none) {
        let comp0 = components(g).swap_remove(0);
        let mut in0 = FixedBitSet::with_capacity(n);
        comp0.iter().for_each(|&v| in0.insert(v));
        let other = (0..n).find(|&v| !in0.contains(v)).expect("disconnected");
        return DistanceReport {
            connected: false,
            diameter: None,
            witness_pair: (0, other),
            witness_path: vec![],
            eccentricity_histogram: BTreeMap::new(),
        };
    }
    let ecc: Vec<usize> = ecc.into_iter().map(|e| e.expect("checked")).collect();
    let diam = *ecc.iter().max().expect("nonempty");
    let u = ecc.iter().position(|&e| e == diam).expect("max exists");
    let layers = bfs_layers(adj, u);
    let v = layers[diam].ones().next().expect("farthest layer nonempty");
    let mut hist = BTreeMap::new();
    for e in ecc {
        *hist.entry(e).or_insert(0) += 1;
    }
    DistanceReport {
        connected: true,
        diameter: Some(diam),
        witness_pair: (u, v),
        witness_path: shortest_path(g, u, v).expect("connected"),
        eccentricity_histogram: hist,
    }
}

/// The distance-4 pair `A = [e_1..e_(2ν-1)]`, `B = [e_1..e_(ν-1), e_(ν+1)..e_2ν]`
/// with the path `A - [e_ν] - [e_1] - [e_2ν] - B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FramePathCheck {
    pub a: VertexId,
    pub b: VertexId,
    pub path: Vec<VertexId>,
    pub edges_valid: bool,
    pub distance: Option<usize>,
}

pub fn frame_path_check(g: &SpiGraph) -> Option<FramePathCheck> {
    let nu = g.nu();
    if nu < 2 {
        return None;
    }
    let n = 2 * nu;
    let f = g.field();
    let sub = |idx: &[usize]| g.vertex_lookup(&Subspace::coordinate(f, n, idx)).expect("nontrivial");
    let a_idx: Vec<usize> = (0..n - 1).collect();
    let b_idx: Vec<usize> = (0..nu - 1).chain(nu..n).collect();
    let a = sub(&a_idx);
    let b = sub(&b_idx);
    let path = vec![a, sub(&[nu - 1]), sub(&[0]), sub(&[n - 1]), b];
    let edges_valid = path.windows(2).all(|w| g.is_adjacent(w[0], w[1]));
    Some(FramePathCheck { a, b, path, edges_valid, distance: distance(g, a, b) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    /// Degree -> number of vertices.
    pub histogram: BTreeMap<usize, usize>,
    pub degree_one: Vec<VertexId>,
    /// The degree-one vertices are exactly the `(2ν-1)`-dimensional ones.
    pub degree_one_are_hyperplanes: bool,
}

pub fn degree_profile(g: &SpiGraph) -> DegreeProfile {
    let mut histogram = BTreeMap::new();
    let mut degree_one = Vec::new();
    for v in 0..g.len() {
        let d = g.degree(v);
        *histogram.entry(d).or_insert(0) += 1;
        if d == 1 {
            degree_one.push(v);
        }
    }
    let hyper = 2 * g.nu() - 1;
    let hyperplanes: Vec<VertexId> = (0..g.len()).filter(|&v| g.vertex(v).dim() == hyper).collect();
    DegreeProfile { histogram, degree_one_are_hyperplanes: degree_one == hyperplanes, degree_one }
}

/// Exact maximum clique of a loop-free bitset graph, by branch and bound
/// with a greedy colouring bound.
pub fn max_clique(adj: &[FixedBitSet]) -> Vec<usize> {
    fn colour_order(adj: &[FixedBitSet], p: &FixedBitSet) -> Vec<(usize, usize)> {
        let mut uncoloured = p.clone();
        let mut out = Vec::with_capacity(p.count_ones(..));
        let mut colour = 0;
        while !uncoloured.is_clear() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.ones().next() {
                q.set(v, false);
                uncoloured.set(v, false);
                q.difference_with(&adj[v]);
                out.push((v, colour));
            }
        }
        out
    }

    fn expand(adj: &[FixedBitSet], r: &mut Vec<usize>, mut p: FixedBitSet, best: &mut Vec<usize>) {
        for (v, colour) in colour_order(adj, &p).into_iter().rev() {
            if r.len() + colour <= best.len() {
                return;
            }
            r.push(v);
            let mut np = p.clone();
            np.intersect_with(&adj[v]);
            if np.is_clear() {
                if r.len() > best.len() {
                    *best = r.clone();
                }
            } else {
                expand(adj, r, np, best);
            }
            r.pop();
            p.set(v, false);
        }
    }

    let n = adj.len();
    let mut best = Vec::new();
    if n == 0 {
        return best;
    }
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    expand(adj, &mut Vec::new(), all, &mut best);
    best.sort_unstable();
    best
}

/// Maximum clique of the point subgraph, as global vertex ids.
pub fn max_clique_points(g: &SpiGraph) -> Vec<VertexId> {
    let pts = g.point_subgraph();
    max_clique(&pts.adjacency).into_iter().map(|i| pts.ids[i]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TypeCensus {
    pub counts: BTreeMap<SympType, u64>,
}

#[derive(Serialize)]
struct CensusEntry {
    m: usize,
    s: usize,
    count: u64,
}

impl Serialize for TypeCensus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.counts.iter().map(|(t, &count)| CensusEntry { m: t.m, s: t.s, count }))
    }
}

impl TypeCensus {
    pub fn get(&self, m: usize, s: usize) -> u64 {
        self.counts.get(&SympType::new(m, s)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `Σ_s N(m, s)`.
    pub fn by_dim(&self, m: usize) -> u64 {
        self.counts.iter().filter(|(t, _)| t.m == m).map(|(_, &c)| c).sum()
    }
}

pub fn type_census(g: &SpiGraph) -> TypeCensus {
    let mut counts = BTreeMap::new();
    for &t in g.types() {
        *counts.entry(t).or_insert(0) += 1;
    }
    TypeCensus { counts }
}

/// `(q^k - 1) / (q - 1)`, the number of points of a `k`-dimensional space.
pub fn projective_count(q: u64, k: u32) -> u64 {
    (q.pow(k) - 1) / (q - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantSignature {
    pub point_count: u64,
    pub point_clique_number: u64,
    pub recovered_nu: u32,
    pub recovered_q: u64,
}

/// Solves `points = (q^2ν - 1)/(q - 1)`, `clique = (q^ν - 1)/(q - 1)` over prime powers `q`.
pub fn recover_parameters(points: u64, clique: u64) -> Result<(u32, u64), AnalysisError> {
    let mut found = Vec::new();
    for q in 2..=points.max(2) {
        if prime_power(q).is_none() {
            continue;
        }
        let mut nu = 1u32;
        while let Some(qpow) = q.checked_pow(2 * nu) {
            let pc = (qpow - 1) / (q - 1);
            if pc > points {
                break;
            }
            if pc == points && projective_count(q, nu) == clique {
                found.push((nu, q));
            }
            nu += 1;
        }
    }
    match found.len() {
        0 => Err(AnalysisError::NoSolution { points, clique }),
        1 => Ok(found[0]),
        _ => Err(AnalysisError::Ambiguous { points, clique }),
    }
}

pub fn invariant_signature(g: &SpiGraph) -> Result<InvariantSignature, AnalysisError> {
    let point_count = g.point_subgraph().len() as u64;
    let point_clique_number = max_clique_points(g).len() as u64;
    let (recovered_nu, recovered_q) = recover_parameters(point_count, point_clique_number)?;
    Ok(InvariantSignature { point_count, point_clique_number, recovered_nu, recovered_q })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Params {
    pub p: u32,
    pub e: u32,
    pub nu: usize,
    pub q: u32,
}

impl Params {
    pub fn of(g: &SpiGraph) -> Self {
        let f = g.field();
        Params { p: f.p(), e: f.e(), nu: g.nu(), q: f.order() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub params: Params,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub loop_count: usize,
    pub components: usize,
    pub diameter: Option<usize>,
    pub witness_pair: (String, String),
    pub witness_path: Vec<String>,
    pub eccentricity_histogram: BTreeMap<usize, usize>,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub census: TypeCensus,
    pub signature: Option<InvariantSignature>,
    pub checks: Vec<Check>,
}

/// Runs every measurement and attaches a flag per claim about the graph family.
pub fn analyze(g: &SpiGraph) -> AnalysisReport {
    let params = Params::of(g);
    let q = u64::from(params.q);
    let nu = g.nu();
    let text = |v: VertexId| g.vertex(v).to_string();

    let comps = components(g);
    let dist = diameter(g);
    let degrees = degree_profile(g);
    let census = type_census(g);
    let clique = max_clique_points(g);
    let signature = invariant_signature(g);

    let mut checks = Vec::new();
    checks.push(Check::new(
        "connected-iff-nu-ge-2",
        dist.connected == (nu >= 2),
        format!("connected = {}, ν = {nu}", dist.connected),
    ));
    if nu >= 2 {
        checks.push(Check::new("diameter-is-4", dist.diameter == Some(4), format!("diameter = {:?}", dist.diameter)));
        let fp = frame_path_check(g).expect("ν >= 2");
        checks.push(Check::new(
            "frame-path-is-shortest",
            fp.edges_valid && fp.distance == Some(4),
            format!("path edges valid = {}, d(A,B) = {:?}", fp.edges_valid, fp.distance),
        ));
        checks.push(Check::new(
            "degree-one-are-hyperplanes",
            degrees.degree_one_are_hyperplanes,
            format!("{} degree-one vertices", degrees.degree_one.len()),
        ));
    } else {
        checks.push(Check::new(
            "components-are-singletons",
            comps.len() as u64 == q + 1,
            format!("{} components for q + 1 = {}", comps.len(), q + 1),
        ));
    }
    let expected_points = projective_count(q, 2 * nu as u32);
    checks.push(Check::new(
        "point-count",
        census.get(1, 0) == expected_points,
        format!("N(1,0) = {}, formula = {expected_points}", census.get(1, 0)),
    ));
    let loop_law = (0..g.len()).all(|v| g.has_loop(v) == g.vertex_type(v).is_isotropic());
    checks.push(Check::new("loop-iff-isotropic", loop_law, format!("{} loops", g.loop_count())));
    let census_ok = (1..2 * nu)
        .all(|m| census.by_dim(m) == gaussian_binomial(2 * nu as u32, m as u32, q));
    checks.push(Check::new("census-matches-gaussian-binomials", census_ok, format!("{} vertices", census.total())));
    let expected_clique = projective_count(q, nu as u32);
    checks.push(Check::new(
        "point-clique-number",
        clique.len() as u64 == expected_clique,
        format!("ω = {}, (q^ν-1)/(q-1) = {expected_clique}", clique.len()),
    ));
    checks.push(match &signature {
        Ok(sig) => Check::new(
            "signature-recovers-parameters",
            (sig.recovered_nu as usize, sig.recovered_q) == (nu, q),
            format!("recovered (ν, q) = ({}, {})", sig.recovered_nu, sig.recovered_q),
        ),
        Err(e) => Check::new("signature-recovers-parameters", false, e.to_string()),
    });

    AnalysisReport {
        params,
        vertex_count: g.len(),
        edge_count: g.edge_count(),
        loop_count: g.loop_count(),
        components: comps.len(),
        diameter: dist.diameter,
        witness_pair: (text(dist.witness_pair.0), text(dist.witness_pair.1)),
        witness_path: dist.witness_path.iter().map(|&v| text(v)).collect(),
        eccentricity_histogram: dist.eccentricity_histogram,
        degree_histogram: degrees.histogram,
        census,
        signature: signature.ok(),
        checks,
    }
}
