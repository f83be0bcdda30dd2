//! Seeded random instances and the fuzzing loop around the splice verifier.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::graph::io::GraphFile;
use crate::graph::{ExtNat, Graph, ReturnPathClass, VertexClass};
use crate::moves::EdgeEnumeration;
use crate::verify::{verify_cuntz_splice_invariance, PsiVariant, VerifyOptions};
use crate::Limits;

/// Range of the per-instance probability that an ordered pair receives
/// edges. Sparse draws give graphs with many ideals.
const EDGE_DENSITY: std::ops::Range<f64> = 0.08..0.45;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub trials: u64,
    pub max_vertices: usize,
    pub max_mult: u64,
    pub psi: PsiVariant,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0,
            trials: 200,
            max_vertices: 8,
            max_mult: 3,
            psi: PsiVariant::Correct,
        }
    }
}

/// A generated graph and the vertex to splice at.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    pub vertex: String,
}

/// On-disk form of an instance: a graph file with one extra field.
#[derive(Debug, Serialize, serde::Deserialize)]
pub struct InstanceFile {
    #[serde(flatten)]
    pub graph: GraphFile,
    pub splice_vertex: String,
}

impl Instance {
    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            graph: GraphFile::from(&self.graph),
            splice_vertex: self.vertex.clone(),
        };
        serde_json::to_string_pretty(&file).expect("instance serializes") + "\n"
    }
}

/// The `i`-th instance of the stream for `cfg.seed`, or `None` when repair
/// fails and the trial is skipped.
///
/// Every returned graph has only regular vertices, satisfies Condition (K)
/// and has at least one vertex with two or more return paths.
pub fn gen_random_instance(cfg: &FuzzConfig, i: u64) -> Option<Instance> {
    let max_vertices = cfg.max_vertices.max(1);
    let max_mult = cfg.max_mult.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(i);

    let n = rng.gen_range(1..=max_vertices);
    let density = rng.gen_range(EDGE_DENSITY);
    let mut g = Graph::new((0..n).map(|k| format!("v{k}"))).expect("names are distinct");
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(density) {
                g.set_mult_at(a, b, ExtNat::Finite(rng.gen_range(1..=max_mult)));
            }
        }
    }

    for _ in 0..4 * n + 4 {
        if !repair(&mut g, &mut rng, max_mult) {
            break;
        }
    }
    if !g.is_regular() || !g.condition_k() {
        return None;
    }
    let reach = g.reachability();
    let candidates: Vec<usize> = (0..n)
        .filter(|&v| g.return_path_class_at(v, &reach) == ReturnPathClass::TwoOrMore)
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let v = candidates[rng.gen_range(0..candidates.len())];
    Some(Instance {
        vertex: g.name(v).to_string(),
        graph: g,
    })
}

/// One repair step; returns whether anything changed.
fn repair(g: &mut Graph, rng: &mut ChaCha8Rng, max_mult: u64) -> bool {
    let n = g.len();
    let sinks: Vec<usize> = (0..n).filter(|&v| g.out_total(v).is_zero()).collect();
    if !sinks.is_empty() {
        for s in sinks {
            // a loop keeps `s` in its own component, so the ideal structure stays rich
            let t = if rng.gen_bool(0.5) { s } else { rng.gen_range(0..n) };
            g.set_mult_at(s, t, ExtNat::Finite(1));
        }
        return true;
    }
    let Some(c) = g.condition_k_witness() else {
        return false;
    };
    // `c` lies on a bare cycle; any extra edge inside its component helps
    let loop_mult = g.mult_at(c, c).finite().unwrap_or(0);
    if loop_mult == 0 {
        g.set_mult_at(c, c, ExtNat::Finite(1));
    } else if loop_mult < max_mult {
        g.set_mult_at(c, c, ExtNat::Finite(loop_mult + 1));
    } else if n > 1 {
        let d = (c + 1 + rng.gen_range(0..n - 1)) % n;
        g.set_mult_at(c, d, ExtNat::Finite(1));
        g.set_mult_at(d, c, ExtNat::Finite(1));
    } else {
        return false;
    }
    true
}

/// A graph with exactly one infinite emitter (and no sinks), a splice
/// vertex, enumerations and a truncation depth.
#[derive(Debug, Clone, PartialEq)]
pub struct CommuteInstance {
    pub graph: Graph,
    pub vertex: String,
    pub orders: Vec<EdgeEnumeration>,
    pub depth: usize,
}

/// Random instance for the desingularization check: at most `max_vertices`
/// vertices, finite multiplicities at most 2, one ω entry, depth 4 to 6.
pub fn gen_commute_instance(seed: u64, i: u64, max_vertices: usize) -> Option<CommuteInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    let n = rng.gen_range(1..=max_vertices.max(1));
    let density = rng.gen_range(EDGE_DENSITY);
    let mut g = Graph::new((0..n).map(|k| format!("v{k}"))).expect("names are distinct");
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(density) {
                g.set_mult_at(a, b, ExtNat::Finite(rng.gen_range(1..=2)));
            }
        }
    }
    let emitter = rng.gen_range(0..n);
    let target = rng.gen_range(0..n);
    g.set_mult_at(emitter, target, ExtNat::Omega);
    for s in 0..n {
        if g.out_total(s).is_zero() {
            let t = rng.gen_range(0..n);
            g.set_mult_at(s, t, ExtNat::Finite(1));
        }
    }

    let reach = g.reachability();
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&v| g.return_path_class_at(v, &reach) == ReturnPathClass::TwoOrMore)
        .collect();
    if candidates.is_empty() {
        let c = rng.gen_range(0..n);
        if g.mult_at(c, c).is_finite() {
            g.set_mult_at(c, c, ExtNat::Finite(2));
        }
        let reach = g.reachability();
        candidates = (0..n)
            .filter(|&v| g.return_path_class_at(v, &reach) == ReturnPathClass::TwoOrMore)
            .collect();
    }
    if candidates.is_empty() {
        return None;
    }
    let v = candidates[rng.gen_range(0..candidates.len())];
    let orders = (0..n)
        .filter(|&e| g.class_at(e) == VertexClass::InfiniteEmitter)
        .map(|e| returning_first(&g, e, v))
        .collect();
    Some(CommuteInstance {
        vertex: g.name(v).to_string(),
        depth: rng.gen_range(4..=6),
        orders,
        graph: g,
    })
}

/// Enumeration of the edges of `e` listing targets that lead back to `v`
/// before the others, so the truncation keeps the return paths at `v`.
fn returning_first(g: &Graph, e: usize, v: usize) -> EdgeEnumeration {
    let reach = g.reachability();
    let mut targets: Vec<usize> = g.successors(e).collect();
    targets.sort_by_key(|&t| (!reach.reaches_refl(t, v), t));
    let mut pattern: Vec<String> = targets
        .iter()
        .filter(|&&t| reach.reaches_refl(t, v) && g.mult_at(e, t) == ExtNat::Omega)
        .map(|&t| g.name(t).to_string())
        .collect();
    let mut cycle = Vec::new();
    for t in targets {
        match g.mult_at(e, t) {
            ExtNat::Finite(k) => pattern.extend((0..k).map(|_| g.name(t).to_string())),
            ExtNat::Omega => cycle.push(g.name(t).to_string()),
        }
    }
    let period_start = pattern.len();
    pattern.extend(cycle);
    EdgeEnumeration {
        vertex: g.name(e).to_string(),
        pattern,
        period_start,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub trials: u64,
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
    /// Trial indices that failed, ascending.
    pub failures: Vec<u64>,
    /// Files written for failing trials, in trial order.
    pub dumped: Vec<PathBuf>,
}

pub fn dump_name(i: u64) -> String {
    format!("trial-{i:05}.graph.json")
}

/// Runs the verifier on `cfg.trials` instances. Failing instances are
/// written to `dump_dir` when given.
pub fn fuzz_run(cfg: &FuzzConfig, limits: &Limits, dump_dir: Option<&Path>) -> Result<FuzzSummary> {
    let mut summary = FuzzSummary {
        trials: cfg.trials,
        ..FuzzSummary::default()
    };
    let options = VerifyOptions {
        psi: cfg.psi,
        verbose: false,
    };
    for i in 0..cfg.trials {
        let Some(inst) = gen_random_instance(cfg, i) else {
            summary.skipped += 1;
            continue;
        };
        let ok = matches!(
            verify_cuntz_splice_invariance(&inst.graph, &inst.vertex, limits, options),
            Ok(r) if r.verdict
        );
        if ok {
            summary.passed += 1;
            continue;
        }
        summary.failed += 1;
        summary.failures.push(i);
        if let Some(dir) = dump_dir {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(dump_name(i));
            std::fs::write(&path, inst.to_json())?;
            summary.dumped.push(path);
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64, max_vertices: usize, max_mult: u64) -> FuzzConfig {
        FuzzConfig {
            seed,
            trials: 1,
            max_vertices,
            max_mult,
            psi: PsiVariant::Correct,
        }
    }

    #[test]
    fn single_vertex_instances() {
        let inst = gen_random_instance(&cfg(1, 1, 2), 0).unwrap();
        assert_eq!(inst.graph.len(), 1);
        assert_eq!(inst.graph.mult_at(0, 0), ExtNat::Finite(2));
        for i in 0..20 {
            assert!(gen_random_instance(&cfg(1, 1, 1), i).is_none());
        }
    }

    #[test]
    fn deterministic_stream() {
        let c = cfg(42, 8, 3);
        for i in 0..10 {
            assert_eq!(gen_random_instance(&c, i), gen_random_instance(&c, i));
        }
    }

    #[test]
    fn generated_instances_are_admissible() {
        let c = cfg(7, 8, 3);
        let lim = Limits::default();
        for i in 0..50 {
            if let Some(inst) = gen_random_instance(&c, i) {
                assert!(inst.graph.is_regular());
                assert!(inst.graph.purely_infinite_report(&lim).unwrap().verdict);
                assert_eq!(
                    inst.graph.return_path_class(&inst.vertex).unwrap(),
                    ReturnPathClass::TwoOrMore
                );
            }
        }
    }

    #[test]
    fn zero_trials() {
        let mut c = cfg(0, 4, 2);
        c.trials = 0;
        let s = fuzz_run(&c, &Limits::default(), None).unwrap();
        assert_eq!(s, FuzzSummary::default());
    }

    #[test]
    fn instance_file_round_trip() {
        let inst = gen_random_instance(&cfg(3, 5, 2), 0).unwrap();
        let back: InstanceFile = serde_json::from_str(&inst.to_json()).unwrap();
        assert_eq!(back.splice_vertex, inst.vertex);
        assert_eq!(Graph::try_from(back.graph).unwrap(), inst.graph);
        assert_eq!(Graph::from_json(&inst.to_json()).unwrap(), inst.graph);
    }
}
