//! Versioned JSON cache for built graphs.
//!
//! The file holds the vertex texts, types, loop flags and adjacency lists of
//! one graph together with a SHA-256 checksum of the payload. A wrong format
//! version, parameter set or checksum makes [`load`] fail and
//! [`load_or_build`] rebuild.

use std::fs;
use std::path::{Path, PathBuf};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GraphError, GraphLimits, SpiGraph};
use crate::gf::FieldSpec;
use crate::linalg::Subspace;
use crate::symplectic::{SympSpace, SympType};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CachePayload {
    pub format_version: u32,
    pub p: u32,
    pub e: u32,
    pub nu: usize,
    pub vertices: Vec<String>,
    pub types: Vec<SympType>,
    pub loops: Vec<usize>,
    pub adjacency: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize, Debug)]
struct CacheFile {
    checksum: String,
    graph: CachePayload,
}

pub fn cache_path(dir: &Path, p: u32, e: u32, nu: usize) -> PathBuf {
    dir.join(format!("spi-p{p}-e{e}-nu{nu}-v{FORMAT_VERSION}.json"))
}

fn checksum(payload: &CachePayload) -> String {
    let bytes = serde_json::to_vec(payload).expect("payload serializes");
    hex::encode(Sha256::digest(bytes))
}

pub fn to_payload(g: &SpiGraph) -> CachePayload {
    let f = g.field();
    CachePayload {
        format_version: FORMAT_VERSION,
        p: f.p(),
        e: f.e(),
        nu: g.nu(),
        vertices: g.vertices().iter().map(|v| v.to_string()).collect(),
        types: g.types().to_vec(),
        loops: g.loops().ones().collect(),
        adjacency: g.adjacency().iter().map(|r| r.ones().collect()).collect(),
    }
}

pub fn from_payload(payload: &CachePayload) -> Result<SpiGraph, GraphError> {
    if payload.format_version != FORMAT_VERSION {
        return Err(GraphError::Cache(format!(
            "format version {} (expected {FORMAT_VERSION})",
            payload.format_version
        )));
    }
    let sp = SympSpace::new(FieldSpec::new(payload.p, payload.e)?, payload.nu)?;
    let n = payload.vertices.len();
    if payload.types.len() != n || payload.adjacency.len() != n {
        return Err(GraphError::Cache("inconsistent table lengths".into()));
    }
    let vertices = payload
        .vertices
        .iter()
        .map(|t| Subspace::parse(sp.field(), t, sp.dim()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut adjacency = Vec::with_capacity(n);
    for row in &payload.adjacency {
        let mut bits = FixedBitSet::with_capacity(n);
        for &v in row {
            if v >= n {
                return Err(GraphError::Cache(format!("neighbour index {v} out of range")));
            }
            bits.insert(v);
        }
        adjacency.push(bits);
    }
    let mut loops = FixedBitSet::with_capacity(n);
    for &v in &payload.loops {
        if v >= n {
            return Err(GraphError::Cache(format!("loop index {v} out of range")));
        }
        loops.insert(v);
    }
    Ok(SpiGraph::from_parts(sp, vertices, adjacency, loops, payload.types.clone()))
}

pub fn save(g: &SpiGraph, dir: &Path) -> Result<PathBuf, GraphError> {
    fs::create_dir_all(dir)?;
    let graph = to_payload(g);
    let file = CacheFile { checksum: checksum(&graph), graph };
    let path = cache_path(dir, file.graph.p, file.graph.e, file.graph.nu);
    let text = serde_json::to_string(&file).map_err(|e| GraphError::Cache(e.to_string()))?;
    fs::write(&path, text)?;
    Ok(path)
}

pub fn load(dir: &Path, p: u32, e: u32, nu: usize) -> Result<SpiGraph, GraphError> {
    let path = cache_path(dir, p, e, nu);
    let text = fs::read_to_string(&path)?;
    let file: CacheFile = serde_json::from_str(&text).map_err(|e| GraphError::Cache(e.to_string()))?;
    if checksum(&file.graph) != file.checksum {
        return Err(GraphError::Cache("checksum mismatch".into()));
    }
    if (file.graph.p, file.graph.e, file.graph.nu) != (p, e, nu) {
        return Err(GraphError::Cache("parameters do not match the file name".into()));
    }
    from_payload(&file.graph)
}

/// Whether a graph came from the cache or was rebuilt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Cached,
    Built,
}

pub fn load_or_build(
    dir: &Path,
    p: u32,
    e: u32,
    nu: usize,
    limits: &GraphLimits,
) -> Result<(SpiGraph, Provenance), GraphError> {
    if let Ok(g) = load(dir, p, e, nu) {
        return Ok((g, Provenance::Cached));
    }
    let sp = SympSpace::new(FieldSpec::new(p, e)?, nu)?;
    let g = SpiGraph::build_with_limits(sp, limits)?;
    save(&g, dir)?;
    Ok((g, Provenance::Built))
}
