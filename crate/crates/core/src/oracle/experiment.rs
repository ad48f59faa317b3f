//! Seeded random instances and the batch duality-gap experiment.

use std::io::Write;
use std::ops::RangeInclusive;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{insert_terminal, mst_length};
use crate::dual::{build_system, drop_edges, solve_dual, verify_certificate, DualOptions};
use crate::geometry::BoundaryConfig;
use crate::planar::{ComplexConfig, PlanarEmbedding};
use crate::primal::{solve_primal, PrimalOptions, PrimalResult};
use crate::topology::{AdmissibleFamily, EdgeId, Tree};

/// Relative duality-gap tolerance used to mark records as passing.
pub const GAP_TOL: f64 = 1e-6;
/// Slack allowed in the weak-duality check.
pub const WEAK_TOL: f64 = 1e-9;
/// Shortest edge, relative to the diameter, for the planar formula to be tried.
pub const PLANAR_MIN_EDGE: f64 = 1e-3;

/// A uniformly random full Steiner topology on `n ≥ 2` terminals.
pub fn random_topology<R: Rng>(n: usize, rng: &mut R) -> Tree {
    assert!(n >= 2, "need at least two terminals");
    if n == 2 {
        return Tree::new(2, 2, vec![(0, 1)]).expect("segment");
    }
    let mut edges = vec![(0, n), (1, n), (2, n)];
    for k in 3..n {
        let at = rng.gen_range(0..edges.len());
        edges = insert_terminal(&edges, at, k, n + k - 2);
    }
    Tree::new(2 * n - 2, n, edges).expect("insertion preserves validity")
}

/// A random admissible family, non-empty unless no single edge is admissible
/// (the one-edge tree). Edges are visited in random order
/// and each is kept with probability one half if the family stays
/// admissible. The first edge visited is tried unconditionally.
pub fn random_admissible_family<R: Rng>(tree: &Tree, rng: &mut R) -> AdmissibleFamily {
    let mut order: Vec<EdgeId> = tree.edge_ids().collect();
    order.shuffle(rng);
    let mut chosen: Vec<EdgeId> = Vec::new();
    for (i, e) in order.into_iter().enumerate() {
        if i > 0 && !rng.gen_bool(0.5) {
            continue;
        }
        chosen.push(e);
        if !tree.is_admissible(&chosen).unwrap_or(false) {
            chosen.pop();
        }
    }
    AdmissibleFamily::new(tree, &chosen).expect("kept admissible")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: usize,
    pub tree: Tree,
    pub boundary: BoundaryConfig,
    /// Family used for the dropped-system check.
    pub drop: AdmissibleFamily,
}

/// Points uniform in the unit cube, topology uniform among full
/// topologies. The stream depends only on the arguments.
pub fn generate_instances(
    seed: u64,
    count: usize,
    n_range: RangeInclusive<usize>,
    m_range: RangeInclusive<usize>,
) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|id| {
            let n = rng.gen_range(n_range.clone());
            let m = rng.gen_range(m_range.clone());
            let coords: Vec<f64> = (0..n * m).map(|_| rng.gen::<f64>()).collect();
            let boundary = BoundaryConfig::from_flat(m, coords).expect("finite coordinates");
            let tree = random_topology(n, &mut rng);
            let drop = random_admissible_family(&tree, &mut rng);
            Instance {
                id,
                tree,
                boundary,
                drop,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub count: usize,
    pub n_range: RangeInclusive<usize>,
    pub m_range: RangeInclusive<usize>,
    pub primal: PrimalOptions,
    pub dual: DualOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            count: 200,
            n_range: 3..=6,
            m_range: 2..=3,
            primal: PrimalOptions::default(),
            dual: DualOptions::default(),
        }
    }
}

/// One row of the experiment output.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRecord {
    pub id: usize,
    pub n: usize,
    pub m: usize,
    pub primal_length: f64,
    pub primal_converged: bool,
    pub dual_value: f64,
    pub dual_converged: bool,
    /// `primal_length - dual_value`.
    pub gap: f64,
    pub gap_ok: bool,
    pub weak_duality: bool,
    pub dual_feasibility: f64,
    pub degenerate_edges: usize,
    /// Set when `m = 2` and the extreme network passes the screen.
    pub planar_length: Option<f64>,
    pub dropped_edges: usize,
    pub reduced_primal: f64,
    pub dropped_dual: f64,
    pub dropped_converged: bool,
    pub dropped_ok: bool,
    pub mst_length: f64,
    pub error: Option<String>,
    pub primal_seconds: f64,
    pub dual_seconds: f64,
}

impl GapRecord {
    fn empty(instance: &Instance) -> Self {
        Self {
            id: instance.id,
            n: instance.boundary.len(),
            m: instance.boundary.dim(),
            primal_length: f64::NAN,
            primal_converged: false,
            dual_value: f64::NAN,
            dual_converged: false,
            gap: f64::NAN,
            gap_ok: false,
            weak_duality: false,
            dual_feasibility: f64::NAN,
            degenerate_edges: 0,
            planar_length: None,
            dropped_edges: instance.drop.edges.len(),
            reduced_primal: f64::NAN,
            dropped_dual: f64::NAN,
            dropped_converged: false,
            dropped_ok: false,
            mst_length: mst_length(&instance.boundary),
            error: None,
            primal_seconds: 0.0,
            dual_seconds: 0.0,
        }
    }

    pub fn converged(&self) -> bool {
        self.primal_converged && self.dual_converged
    }
}

/// The embedding of a planar extreme network, if the binary formula
/// applies to it: converged, `m = 2`, and no edge shorter than
/// [`PLANAR_MIN_EDGE`] times the diameter.
pub fn screen_planar(primal: &PrimalResult) -> Option<PlanarEmbedding> {
    let net = &primal.network;
    if net.dim() != 2 || !primal.converged {
        return None;
    }
    let min_edge = net.boundary().scale() * PLANAR_MIN_EDGE;
    if net.tree().edge_ids().any(|e| net.edge_length(e) < min_edge) {
        return None;
    }
    PlanarEmbedding::from_network(net).ok()
}

fn run_instance(instance: &Instance, config: &ExperimentConfig) -> GapRecord {
    let mut rec = GapRecord::empty(instance);
    let z = &instance.boundary;

    let t0 = Instant::now();
    let primal = match solve_primal(&instance.tree, z, &config.primal) {
        Ok(p) => p,
        Err(e) => {
            rec.error = Some(format!("primal: {e}"));
            return rec;
        }
    };
    rec.primal_seconds = t0.elapsed().as_secs_f64();
    rec.primal_length = primal.length;
    rec.primal_converged = primal.converged;
    rec.degenerate_edges = primal
        .network
        .degenerate_edges(z.default_degeneracy_tol())
        .degenerate_edges
        .len();

    let system = build_system(&instance.tree, z.dim());
    let t1 = Instant::now();
    match solve_dual(&system, z, &config.dual) {
        Ok(d) => {
            rec.dual_seconds = t1.elapsed().as_secs_f64();
            let report = verify_certificate(&d.theta, &primal.network, WEAK_TOL);
            rec.dual_value = d.value;
            rec.dual_converged = d.converged;
            rec.dual_feasibility = d.feasibility_residual;
            rec.gap = report.gap;
            rec.weak_duality = d.value <= primal.length + WEAK_TOL;
            rec.gap_ok = rec.gap <= GAP_TOL * (1.0 + primal.length) && rec.weak_duality;
        }
        Err(e) => rec.error = Some(format!("dual: {e}")),
    }

    if let Some(embedding) = screen_planar(&primal) {
        if let Ok(cz) = ComplexConfig::from_boundary(z) {
            rec.planar_length = embedding.planar_length(&cz, 0).ok().map(|p| p.length);
        }
    }

    let reduced = instance.tree.reduce(&instance.drop);
    let dropped = drop_edges(&system, &instance.tree, &instance.drop);
    match (solve_primal(&reduced.tree, z, &config.primal), dropped) {
        (Ok(rp), Ok(ds)) => match solve_dual(&ds, z, &config.dual) {
            Ok(dd) => {
                rec.reduced_primal = rp.length;
                rec.dropped_dual = dd.value;
                rec.dropped_converged = rp.converged && dd.converged;
                rec.dropped_ok = (dd.value - rp.length).abs() <= GAP_TOL * rp.length.abs().max(f64::MIN_POSITIVE);
            }
            Err(e) => rec.error = Some(format!("dropped dual: {e}")),
        },
        (Err(e), _) => rec.error = Some(format!("reduced primal: {e}")),
        (_, Err(e)) => rec.error = Some(format!("drop: {e}")),
    }
    rec
}

/// Runs every instance (in parallel) and returns the records in id order.
/// Failures are recorded in the row and never stop the batch.
pub fn run_gap_experiment(config: &ExperimentConfig) -> Vec<GapRecord> {
    let instances = generate_instances(config.seed, config.count, config.n_range.clone(), config.m_range.clone());
    instances.par_iter().map(|inst| run_instance(inst, config)).collect()
}

const COLUMNS: [&str; 20] = [
    "id",
    "n",
    "m",
    "primal_length",
    "primal_converged",
    "dual_value",
    "dual_converged",
    "gap",
    "gap_ok",
    "weak_duality",
    "dual_feasibility",
    "degenerate_edges",
    "planar_length",
    "dropped_edges",
    "reduced_primal",
    "dropped_dual",
    "dropped_converged",
    "dropped_ok",
    "mst_length",
    "error",
];

/// Shortest round-trip form, switching to exponent notation for very small
/// or large magnitudes.
fn num(x: f64) -> String {
    if x != 0.0 && x.is_finite() && !(1e-4..1e15).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Comma-separated output with one header line. Runtimes are appended as
/// `primal_seconds,dual_seconds` only when `timings` is set, so that the
/// default output depends on the seed alone.
pub fn write_records<W: Write>(records: &[GapRecord], out: W, timings: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if timings {
        header.extend(["primal_seconds", "dual_seconds"]);
    }
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.id.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            num(r.primal_length),
            r.primal_converged.to_string(),
            num(r.dual_value),
            r.dual_converged.to_string(),
            num(r.gap),
            r.gap_ok.to_string(),
            r.weak_duality.to_string(),
            num(r.dual_feasibility),
            r.degenerate_edges.to_string(),
            r.planar_length.map(num).unwrap_or_default(),
            r.dropped_edges.to_string(),
            num(r.reduced_primal),
            num(r.dropped_dual),
            r.dropped_converged.to_string(),
            r.dropped_ok.to_string(),
            num(r.mst_length),
            r.error.clone().unwrap_or_default(),
        ];
        if timings {
            row.push(num(r.primal_seconds));
            row.push(num(r.dual_seconds));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
