use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use spi_core::analysis::{self, Params};
use spi_core::autsearch;
use spi_core::groups::{self, OrbitReport};
use spi_core::report::{all_pass, Check};
use spi_core::spigraph::cache::{self, Provenance};
use spi_core::spigraph::GraphLimits;
use spi_core::{FieldSpec, SpiGraph, Subspace, SympSpace};

#[derive(Parser, Debug)]
#[command(name = "spi", version, about = "Symplectic inner product graphs over finite fields")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Field characteristic.
    #[arg(long, global = true, default_value_t = 2)]
    p: u32,
    /// Field degree: q = p^e.
    #[arg(long, global = true, default_value_t = 1)]
    e: u32,
    /// Half the ambient dimension.
    #[arg(long, global = true, default_value_t = 2)]
    nu: usize,
    /// Graph cache directory; SPI_CACHE_DIR takes precedence.
    #[arg(long, global = true, default_value = "spi-cache")]
    cache_dir: PathBuf,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the graph and store it in the cache.
    Build,
    /// Connectivity, diameter, degrees, clique number, census and signature.
    Analyze,
    /// Vertex (and edge) orbits under the symplectic transvections.
    Orbits {
        #[arg(long)]
        edges: bool,
        /// Include a witness word per class.
        #[arg(long)]
        words: bool,
    },
    /// Full automorphism group by search, compared with Sp and E.
    Aut,
    /// A symplectic T with A·T = B.
    Witness {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Write the graph in DOT format.
    Export {
        #[arg(long)]
        dot: bool,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl RunConfig {
    fn cache_dir(&self) -> PathBuf {
        std::env::var_os("SPI_CACHE_DIR").map(PathBuf::from).unwrap_or_else(|| self.cache_dir.clone())
    }

    fn space(&self) -> Result<SympSpace> {
        let f = FieldSpec::new(self.p, self.e).with_context(|| format!("invalid field p={} e={}", self.p, self.e))?;
        Ok(SympSpace::new(f, self.nu)?)
    }

    fn graph(&self) -> Result<(SpiGraph, Provenance, PathBuf)> {
        self.space()?;
        let dir = self.cache_dir();
        let (g, prov) = cache::load_or_build(&dir, self.p, self.e, self.nu, &GraphLimits::default())
            .with_context(|| format!("building Spi({}, {}^{})", 2 * self.nu, self.p, self.e))?;
        Ok((g, prov, cache::cache_path(&dir, self.p, self.e, self.nu)))
    }

    fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            bail!("format {f:?} is not available for this command");
        }
        Ok(f)
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        println!("{c}");
    }
}

fn cmd_build(cfg: &RunConfig) -> Result<bool> {
    let fmt = cfg.format_or(Format::Text, &[Format::Text, Format::Json])?;
    let (g, prov, path) = cfg.graph()?;
    let provenance = match prov {
        Provenance::Cached => "cached",
        Provenance::Built => "built",
    };
    if fmt == Format::Json {
        print_json(&json!({
            "params": Params::of(&g),
            "vertices": g.len(),
            "edges": g.edge_count(),
            "loops": g.loop_count(),
            "cache": path,
            "provenance": provenance,
        }))?;
    } else {
        println!("vertices {}", g.len());
        println!("edges {}", g.edge_count());
        println!("loops {}", g.loop_count());
        println!("cache {} ({provenance})", path.display());
    }
    Ok(true)
}

fn cmd_analyze(cfg: &RunConfig) -> Result<bool> {
    let fmt = cfg.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let (g, _, _) = cfg.graph()?;
    let rep = analysis::analyze(&g);
    if fmt == Format::Json {
        print_json(&rep)?;
    } else {
        println!("vertices {} edges {} loops {}", rep.vertex_count, rep.edge_count, rep.loop_count);
        println!("components {}", rep.components);
        match rep.diameter {
            Some(d) => println!("diameter {d}: {}", rep.witness_path.join(" -- ")),
            None => println!("diameter infinite"),
        }
        for (t, n) in &rep.census.counts {
            println!("N{t} = {n}");
        }
        print_checks(&rep.checks);
    }
    Ok(all_pass(&rep.checks))
}

#[derive(Serialize)]
struct OrbitsOutput {
    params: Params,
    vertex: OrbitReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge: Option<OrbitReport>,
    checks: Vec<Check>,
}

fn cmd_orbits(cfg: &RunConfig, edges: bool, words: bool) -> Result<bool> {
    let fmt = cfg.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let (g, _, _) = cfg.graph()?;
    let sp_gens = groups::transvection_perms(&g)?;
    let mut with_e = sp_gens.clone();
    with_e.extend(groups::descriptor_perms(&g)?);

    let vertex = groups::vertex_orbit_report(&g, &sp_gens, words)?;
    let vertex_e = groups::vertex_orbits(&g, &with_e)?;
    let mut checks = vec![
        Check::new("vertex-orbits-are-type-classes", vertex.matches_invariant, format!("{} orbits", vertex.classes.len())),
        Check::new(
            "frame-maps-keep-vertex-orbits",
            vertex_e.len() == vertex.classes.len(),
            format!("{} orbits with σ_(k,π) added", vertex_e.len()),
        ),
    ];
    let edge = if edges {
        let r = groups::edge_orbit_report(&g, &sp_gens, words)?;
        let r_e = groups::edge_orbits(&g, &with_e)?;
        checks.push(Check::new(
            "edge-orbits-are-type-triples",
            r.matches_invariant,
            format!("{} orbits", r.classes.len()),
        ));
        checks.push(Check::new(
            "frame-maps-keep-edge-orbits",
            r_e.partition.len() == r.classes.len(),
            format!("{} orbits with σ_(k,π) added", r_e.partition.len()),
        ));
        Some(r)
    } else {
        None
    };
    let out = OrbitsOutput { params: Params::of(&g), vertex, edge, checks };
    if fmt == Format::Json {
        print_json(&out)?;
    } else {
        for r in std::iter::once(&out.vertex).chain(&out.edge) {
            println!("{} orbits (group order {}):", r.kind, r.group_order);
            for c in &r.classes {
                println!("  {} size {} rep {}", c.invariant, c.size, c.representative);
            }
        }
        print_checks(&out.checks);
    }
    Ok(all_pass(&out.checks))
}

fn cmd_aut(cfg: &RunConfig) -> Result<bool> {
    let fmt = cfg.format_or(Format::Json, &[Format::Json, Format::Text])?;
    let (g, _, _) = cfg.graph()?;
    let rep = autsearch::aut_report(&g).map_err(|e| match e {
        autsearch::SearchError::TooLarge { vertices, max } => anyhow::anyhow!(
            "Spi({}, {}) has {vertices} vertices; the automorphism search is limited to {max}",
            2 * cfg.nu,
            cfg.p.pow(cfg.e)
        ),
        e => e.into(),
    })?;
    if fmt == Format::Json {
        print_json(&rep)?;
    } else {
        let c = &rep.comparisons;
        println!("order {} ({} generators)", rep.order, rep.num_generators);
        println!("sp_order {}", c.sp_order);
        println!("sp_plus_e_order {}", c.sp_plus_e_order);
        println!("formula_value {}", c.formula_value);
        print_checks(&c.checks);
    }
    Ok(all_pass(&rep.comparisons.checks))
}

fn cmd_witness(cfg: &RunConfig, from: &str, to: &str) -> Result<bool> {
    let fmt = cfg.format_or(Format::Text, &[Format::Text, Format::Json])?;
    let sp = cfg.space()?;
    let f = sp.field();
    let a = Subspace::parse(f, from, sp.dim()).with_context(|| format!("parsing --from {from:?}"))?;
    let b = Subspace::parse(f, to, sp.dim()).with_context(|| format!("parsing --to {to:?}"))?;
    let t = sp.transitivity_witness(&a, &b)?;
    let verified = sp.act_matrix(&t, &a)? == b && sp.is_symplectic(t.matrix())?;
    if fmt == Format::Json {
        print_json(&json!({
            "from": a.to_string(),
            "to": b.to_string(),
            "type": sp.type_of(&a)?,
            "T": t.matrix().to_string(),
            "verified": verified,
        }))?;
    } else {
        println!("{}", t.matrix());
    }
    Ok(verified)
}

fn cmd_export(cfg: &RunConfig, out: Option<&Path>) -> Result<bool> {
    cfg.format_or(Format::Dot, &[Format::Dot])?;
    let (g, _, _) = cfg.graph()?;
    let dot = g.to_dot();
    match out {
        Some(path) => fs::write(path, dot).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{dot}"),
    }
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let cfg = &cli.cfg;
    match &cli.command {
        Command::Build => cmd_build(cfg),
        Command::Analyze => cmd_analyze(cfg),
        Command::Orbits { edges, words } => cmd_orbits(cfg, *edges, *words),
        Command::Aut => cmd_aut(cfg),
        Command::Witness { from, to } => cmd_witness(cfg, from, to),
        // DOT is the only export format, so the flag is accepted for symmetry
        Command::Export { dot: _, out } => cmd_export(cfg, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
