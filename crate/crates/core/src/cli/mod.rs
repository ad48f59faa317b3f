//! Command-line front end.
//!
//! Exit codes: `0` success, `1` bad input or I/O failure, `2` a solver did
//! not converge (the report is still printed).

pub mod instance;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::dual::{build_system, drop_edges, solve_dual, verify_certificate, DualOptions};
use crate::oracle::{self, enumerate_topologies, steiner_oracle, write_records, ExperimentConfig};
use crate::planar::{planar_length_general, ComplexConfig, PlanarEmbedding, PlanarError};
use crate::primal::{solve_primal, PrimalOptions};
use crate::topology::{AdmissibleFamily, EdgeId};
use instance::{Instance, InstanceError, InstanceFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Instance(#[from] InstanceError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Output(#[from] io::Error),
}

type Outcome = Result<i32, CliError>;

#[derive(Debug, Parser)]
#[command(name = "maxwell-trees", version, about = "Extreme networks of fixed topology and their dual certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the length minimization and its dual, and compare them.
    Solve {
        instance: PathBuf,
        /// Degeneracy tolerance relative to the boundary diameter.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Drop the cylinders of `drop_edges` before the dual solve and solve
        /// the primal on the reduced tree.
        #[arg(long)]
        drop: bool,
    },
    /// Print the instance obtained by contracting `drop_edges`.
    Reduce { instance: PathBuf },
    /// Evaluate the planar length formula on an embedded binary tree.
    Planar {
        instance: PathBuf,
        /// Relative tolerance for the agreement with the extreme network.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write a drawing of the extreme network.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the seeded duality-gap experiment.
    Experiment {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        m_min: usize,
        #[arg(long, default_value_t = 3)]
        m_max: usize,
        /// Records file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append per-instance runtimes (makes the output non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// List the full Steiner topologies on `n` terminals, or find the
    /// shortest one for the boundary of an instance.
    Enumerate {
        #[arg(required_unless_present = "instance")]
        n: Option<usize>,
        #[arg(long, conflicts_with = "n")]
        instance: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve { instance, tol, drop } => cmd_solve(&instance, tol, drop, out),
        Command::Reduce { instance } => cmd_reduce(&instance, out),
        Command::Planar { instance, tol, svg } => cmd_planar(&instance, tol, svg.as_deref(), out, err),
        Command::Experiment {
            seed,
            count,
            n_min,
            n_max,
            m_min,
            m_max,
            out: path,
            timings,
        } => cmd_experiment(seed, count, (n_min, n_max), (m_min, m_max), path.as_deref(), timings, out),
        Command::Enumerate { n, instance } => cmd_enumerate(n, instance.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

/// `x` with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&exp) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn load(path: &Path) -> Result<(InstanceFile, Instance), CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let file = InstanceFile::parse(&text)?;
    let inst = file.resolve()?;
    Ok((file, inst))
}

fn vertex_list(vs: impl IntoIterator<Item = usize>, labels: &[usize]) -> String {
    vs.into_iter().map(|v| format!("v{}", labels[v])).collect::<Vec<_>>().join(", ")
}

fn edge_name(inst: &Instance, e: EdgeId) -> String {
    let (a, b) = inst.tree.edges()[e.0];
    format!("{e} (v{}-v{})", inst.labels[a], inst.labels[b])
}

fn cmd_solve(path: &Path, tol: f64, drop: bool, out: &mut dyn Write) -> Outcome {
    let (_, inst) = load(path)?;
    let z = &inst.boundary;
    let full = build_system(&inst.tree, z.dim());
    let (family, system) = if drop {
        let family = inst
            .drop
            .clone()
            .ok_or_else(|| CliError::Input("--drop needs drop_edges in the instance".into()))?;
        let system = drop_edges(&full, &inst.tree, &family).map_err(|e| CliError::Input(e.to_string()))?;
        (family, system)
    } else {
        (AdmissibleFamily::empty(), full)
    };
    let reduced = inst.tree.reduce(&family);
    let primal =
        solve_primal(&reduced.tree, z, &PrimalOptions::default()).map_err(|e| CliError::Input(e.to_string()))?;
    let dual = solve_dual(&system, z, &DualOptions::default()).map_err(|e| CliError::Input(e.to_string()))?;

    writeln!(
        out,
        "instance: {} boundary vertices, {} interior, dimension {}",
        z.len(),
        inst.tree.interior_count(),
        z.dim()
    )?;
    if drop {
        let names: Vec<String> = family.edges.iter().map(|&e| edge_name(&inst, e)).collect();
        writeln!(out, "dropped edges: {}", names.join(", "))?;
    }
    writeln!(
        out,
        "primal length: {} (converged: {}, {} iterations)",
        fmt12(primal.length),
        primal.converged,
        primal.iterations
    )?;
    writeln!(
        out,
        "dual value: {} (converged: {}, {} iterations)",
        fmt12(dual.value),
        dual.converged,
        dual.iterations
    )?;
    writeln!(out, "gap: {}", fmt12(primal.length - dual.value))?;
    let active: Vec<String> = dual
        .active_cylinders
        .iter()
        .map(|&i| {
            let c = &system.cylinders()[i];
            format!("{} {{{}}}", c.edge, vertex_list(c.subset.iter().copied(), &inst.labels))
        })
        .collect();
    writeln!(out, "active cylinders: {}", if active.is_empty() { "none".into() } else { active.join(", ") })?;

    // Reduced edges carry the ids of the original edges they came from.
    let mut origin = vec![EdgeId(0); reduced.tree.edge_count()];
    for (i, r) in reduced.edge_map.iter().enumerate() {
        if let Some(r) = r {
            origin[r.0] = EdgeId(i);
        }
    }
    let degenerate = primal.network.degenerate_edges(tol * z.scale());
    let names: Vec<String> = degenerate
        .degenerate_edges
        .iter()
        .map(|&e| edge_name(&inst, origin[e.0]))
        .collect();
    writeln!(
        out,
        "degenerate edges: {}",
        if names.is_empty() { "none".into() } else { names.join(", ") }
    )?;
    let report = verify_certificate(&dual.theta, &primal.network, 1e-9);
    writeln!(
        out,
        "dual feasibility residual: {}; weak duality: {}",
        fmt12(report.max_cylinder_residual().max(report.sigma_residual)),
        report.weak_duality_holds
    )?;
    Ok(if primal.converged && dual.converged { 0 } else { 2 })
}

fn cmd_reduce(path: &Path, out: &mut dyn Write) -> Outcome {
    let (file, inst) = load(path)?;
    let family = inst
        .drop
        .ok_or_else(|| CliError::Input("instance has no drop_edges".into()))?;
    if family.edges.is_empty() {
        writeln!(out, "{}", file.to_json())?;
        return Ok(0);
    }
    let reduced = inst.tree.reduce(&family);
    writeln!(out, "{}", InstanceFile::from_parts(&reduced.tree, &inst.boundary).to_json())?;
    Ok(0)
}

fn planar_error(e: PlanarError, inst: &Instance) -> CliError {
    let label = |v: usize| inst.labels.get(v).copied().unwrap_or(v + 1);
    let msg = match e {
        PlanarError::NotBinary { vertex, degree } => {
            let kind = if inst.tree.is_boundary(vertex) { "boundary" } else { "interior" };
            format!("tree is not binary: {kind} vertex v{} has degree {degree}", label(vertex))
        }
        PlanarError::MissingRotation(v) => format!("missing rotation for interior vertex v{}", label(v)),
        PlanarError::BadRotation(v) => format!("rotation at v{} must list exactly its neighbours", label(v)),
        other => other.to_string(),
    };
    CliError::Input(msg)
}

fn cmd_planar(path: &Path, tol: f64, svg: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let (_, inst) = load(path)?;
    let z = &inst.boundary;
    if z.dim() != 2 {
        return Err(CliError::Input(format!("planar formulas need m = 2, got {}", z.dim())));
    }
    let n = z.len();
    let rotations = inst
        .rotations
        .clone()
        .ok_or_else(|| CliError::Input("instance has no rotation system".into()))?;
    let mut orders = Vec::with_capacity(rotations.len());
    for (i, r) in rotations.into_iter().enumerate() {
        orders.push(r.ok_or_else(|| planar_error(PlanarError::MissingRotation(n + i), &inst))?);
    }
    let embedding = PlanarEmbedding::new(inst.tree.clone(), &orders).map_err(|e| planar_error(e, &inst))?;
    let cz = ComplexConfig::from_boundary(z).map_err(|e| planar_error(e, &inst))?;

    let table = embedding.twisting_table();
    writeln!(out, "twisting numbers:")?;
    let header: Vec<String> = (0..n).map(|q| format!("{:>5}", format!("v{}", inst.labels[q]))).collect();
    writeln!(out, "{:>5} {}", "", header.join(" "))?;
    for p in 0..n {
        let row: Vec<String> = table.values[p].iter().map(|t| format!("{t:>5}")).collect();
        writeln!(out, "{:>5} {}", format!("v{}", inst.labels[p]), row.join(" "))?;
    }
    let t1: Vec<String> = embedding
        .t_vector(0)
        .iter()
        .map(|c| format!("{}{}{}i", fmt12(c.re), if c.im < 0.0 { "-" } else { "+" }, fmt12(c.im.abs())))
        .collect();
    writeln!(out, "t_1: ({})", t1.join(", "))?;
    let planar = embedding.planar_length(&cz, 0).map_err(|e| planar_error(e, &inst))?;
    writeln!(out, "planar length: {}", fmt12(planar.length))?;
    let dirs = embedding.edge_directions(&cz).map_err(|e| planar_error(e, &inst))?;
    let psi: Vec<String> = dirs
        .direct
        .iter()
        .enumerate()
        .map(|(k, a)| format!("v{}: {}", inst.labels[k], fmt12(a.to_degrees())))
        .collect();
    writeln!(out, "psi (degrees): {}", psi.join(", "))?;

    let primal =
        solve_primal(&inst.tree, z, &PrimalOptions::default()).map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(out, "primal length: {} (converged: {})", fmt12(primal.length), primal.converged)?;
    let mismatch = (planar.length - primal.length).abs();
    if mismatch > tol * (1.0 + primal.length) {
        writeln!(
            err,
            "warning: planar formula differs from the extreme network by {}; the network is degenerate or not locally minimal",
            fmt12(mismatch)
        )?;
        let deg = primal.network.degenerate_edges(z.default_degeneracy_tol());
        if !deg.degenerate_edges.is_empty() {
            let names: Vec<String> = deg.degenerate_edges.iter().map(|&e| edge_name(&inst, e)).collect();
            writeln!(out, "degenerate edges: {}", names.join(", "))?;
        }
        if let Ok(g) = planar_length_general(&embedding, &primal.network, z.default_degeneracy_tol()) {
            writeln!(
                out,
                "planar length of the reduced network ({} pieces): {}",
                g.components.len(),
                fmt12(g.length)
            )?;
        }
    }
    if let Some(svg_path) = svg {
        fs::write(svg_path, svg::render(&primal.network, &inst.labels)).map_err(|source| CliError::Write {
            path: svg_path.to_path_buf(),
            source,
        })?;
    }
    Ok(if primal.converged { 0 } else { 2 })
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let fail = |source: io::Error| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn cmd_experiment(
    seed: u64,
    count: usize,
    n: (usize, usize),
    m: (usize, usize),
    path: Option<&Path>,
    timings: bool,
    out: &mut dyn Write,
) -> Outcome {
    if n.0 < 2 || n.0 > n.1 {
        return Err(CliError::Input(format!("bad terminal range {}..={}", n.0, n.1)));
    }
    if m.0 < 1 || m.0 > m.1 {
        return Err(CliError::Input(format!("bad dimension range {}..={}", m.0, m.1)));
    }
    let config = ExperimentConfig {
        seed,
        count,
        n_range: n.0..=n.1,
        m_range: m.0..=m.1,
        ..Default::default()
    };
    let records = oracle::run_gap_experiment(&config);
    let mut bytes = Vec::new();
    write_records(&records, &mut bytes, timings).map_err(|e| CliError::Output(e.into()))?;
    match path {
        Some(p) => {
            write_atomically(p, &bytes)?;
            let converged = records.iter().filter(|r| r.converged()).count();
            let gap_ok = records.iter().filter(|r| r.converged() && r.gap_ok).count();
            let weak = records.iter().filter(|r| r.weak_duality).count();
            writeln!(
                out,
                "{} records written to {}; converged {converged}, gap within tolerance {gap_ok}, weak duality {weak}",
                records.len(),
                p.display()
            )?;
        }
        None => out.write_all(&bytes)?,
    }
    Ok(0)
}

fn cmd_enumerate(n: Option<usize>, path: Option<&Path>, out: &mut dyn Write) -> Outcome {
    if let Some(path) = path {
        let (_, inst) = load(path)?;
        let z = &inst.boundary;
        let best = steiner_oracle(z, &PrimalOptions::default()).map_err(|e| CliError::Input(e.to_string()))?;
        let catalog = enumerate_topologies(z.len()).map_err(|e| CliError::Input(e.to_string()))?;
        for (i, (tree, len)) in catalog.trees.iter().zip(&best.lengths).enumerate() {
            writeln!(out, "T{}: {}  length {}", i + 1, edge_listing(tree, &inst.labels), fmt12(*len))?;
        }
        writeln!(out, "shortest: T{} with length {}", best.index + 1, fmt12(best.length))?;
        if best.flagged() {
            let list: Vec<String> = best.non_converged.iter().map(|i| format!("T{}", i + 1)).collect();
            writeln!(out, "not converged: {}", list.join(", "))?;
            return Ok(2);
        }
        return Ok(0);
    }
    let n = n.expect("clap requires n or --instance");
    let catalog = enumerate_topologies(n).map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(out, "{} full topologies on {n} terminals", catalog.len())?;
    let labels: Vec<usize> = (1..=n).collect();
    for (i, tree) in catalog.trees.iter().enumerate() {
        writeln!(out, "T{}: {}", i + 1, edge_listing(tree, &labels))?;
    }
    Ok(0)
}

/// Edges as `a-b`, terminals by label and Steiner points as `s1, s2, ..`.
fn edge_listing(tree: &crate::topology::Tree, labels: &[usize]) -> String {
    let n = tree.boundary_count();
    let name = |v: usize| if v < n { labels[v].to_string() } else { format!("s{}", v - n + 1) };
    tree.edges()
        .iter()
        .map(|&(a, b)| format!("{}-{}", name(a), name(b)))
        .collect::<Vec<_>>()
        .join(" ")
}
