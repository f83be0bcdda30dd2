//! The `gsplice` command line, as a library function so it can be driven
//! from tests.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexClass};
use crate::harness::{fuzz_run, FuzzConfig};
use crate::ideals::{ideal_lattice, prim_space};
use crate::moves::{
    cuntz_splice, desingularize_truncated, verify_desing_splice_commutes, EdgeEnumeration,
};
use crate::verify::{verify_cuntz_splice_invariance, PsiVariant, VerifyOptions};
use crate::xk::{filtered_xk, k_theory};
use crate::Limits;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gsplice", version, about = "Exact invariants of directed graphs and Cuntz splice checks")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Include matrices in reports.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pure-infiniteness criteria; exits 1 if one fails.
    Check(GraphArg),
    /// Admissible pairs and their order.
    Ideals(GraphArg),
    /// Join-irreducible points with their vertex sets.
    Prim(GraphArg),
    /// K₀ and K₁ of the graph.
    K(GraphArg),
    /// Filtered K-groups over the primitive ideal space.
    Xk(GraphArg),
    /// Print the graph with a Cuntz splice at a vertex.
    Splice(VertexArgs),
    /// Verify that splicing at a vertex preserves the filtered invariant.
    Verify {
        #[command(flatten)]
        target: VertexArgs,
        /// Use a deliberately wrong chain map (negative control).
        #[arg(long)]
        broken_psi: bool,
    },
    /// Truncated desingularization.
    Desing {
        #[command(flatten)]
        graph: GraphArg,
        /// Tail length grown at each singular vertex.
        #[arg(long)]
        depth: usize,
        /// JSON list of edge enumerations for the infinite emitters.
        #[arg(long)]
        order: Option<PathBuf>,
    },
    /// Check that truncated desingularization commutes with the splice.
    Commute {
        #[command(flatten)]
        target: VertexArgs,
        /// Tail length, at least 3.
        #[arg(long)]
        depth: usize,
        /// JSON list of edge enumerations for the infinite emitters.
        #[arg(long)]
        order: Option<PathBuf>,
    },
    /// Run the verifier on random instances.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 8)]
        max_vertices: usize,
        #[arg(long, default_value_t = 3)]
        max_mult: u64,
        /// Write failing instances here.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
        /// Use a deliberately wrong chain map (negative control).
        #[arg(long)]
        broken_psi: bool,
    },
    /// DOT rendering of the graph, or of its ideal lattice.
    Dot {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        hasse: bool,
    },
}

#[derive(Debug, Args)]
struct GraphArg {
    /// Graph JSON file.
    graph: PathBuf,
}

#[derive(Debug, Args)]
struct VertexArgs {
    graph: PathBuf,
    vertex: String,
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String, verdict: bool) -> Self {
        Outcome {
            code: if verdict { EXIT_OK } else { EXIT_FALSE },
            stdout,
            stderr: String::new(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_ERROR,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text, true)
            };
        }
    };
    match dispatch(&cli, &Limits::from_env()) {
        Ok(o) => o,
        Err(e) => Outcome {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn load(path: &Path) -> Result<Graph> {
    Graph::from_json(&std::fs::read_to_string(path)?)
}

fn load_orders(g: &Graph, path: Option<&Path>) -> Result<Vec<EdgeEnumeration>> {
    match path {
        Some(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => (0..g.len())
            .filter(|&i| g.class_at(i) == VertexClass::InfiniteEmitter)
            .map(|i| EdgeEnumeration::canonical(g, g.name(i)))
            .collect(),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn dispatch(cli: &Cli, limits: &Limits) -> Result<Outcome> {
    let as_json = cli.json;
    let render = |value: &dyn erased::Render, text: String| if as_json { value.json() } else { text };
    match &cli.command {
        Command::Check(a) => {
            let g = load(&a.graph)?;
            let r = g.purely_infinite_report(limits)?;
            let mut text = format!("purely infinite: {}\n", if r.verdict { "yes" } else { "no" });
            let _ = writeln!(text, "  Condition (K): {}", r.condition_k);
            if let Some(v) = &r.single_return_path_vertex {
                let _ = writeln!(text, "    vertex with one return path: {v}");
            }
            let _ = writeln!(text, "  no breaking vertices: {}", r.no_breaking_vertices);
            let _ = writeln!(text, "  maximal tails connect to cycles: {}", r.tails_connect_to_cycles);
            if let Some(w) = &r.tail_witness {
                let _ = writeln!(text, "    vertex {} in tail {{{}}}", w.vertex, w.tail.join(", "));
            }
            if let Some(c) = r.failing_criterion() {
                let _ = writeln!(text, "failing criterion: {c}");
            }
            Ok(Outcome::ok(render(&r, text), r.verdict))
        }
        Command::Ideals(a) => {
            let g = load(&a.graph)?;
            let lat = ideal_lattice(&g, limits)?;
            let mut text = format!("{} admissible pairs\n", lat.len());
            for i in 0..lat.len() {
                let _ = writeln!(text, "  p{i}  {}", lat.describe(i));
            }
            for (i, j) in lat.hasse_edges() {
                let _ = writeln!(text, "  p{i} < p{j}");
            }
            Ok(Outcome::ok(render(&lat, text), true))
        }
        Command::Prim(a) => {
            let g = load(&a.graph)?;
            let x = prim_space(&ideal_lattice(&g, limits)?)?;
            let mut text = format!("{} points\n", x.len());
            for p in 0..x.len() {
                let _ = writeln!(text, "  x{p}  H = {{{}}}", x.h_names(p).join(", "));
            }
            for (p, q) in x.strict_pairs() {
                let _ = writeln!(text, "  x{p} > x{q}");
            }
            Ok(Outcome::ok(render(&x, text), true))
        }
        Command::K(a) => {
            let g = load(&a.graph)?;
            let k = k_theory(&g);
            let mut text = format!("K₀ = {}\nK₁ = {}\n", k.k0, k.k1);
            if !g.is_regular() {
                text.push_str("(unfiltered formula: singular vertices present)\n");
            }
            Ok(Outcome::ok(render(&k, text), true))
        }
        Command::Xk(a) => {
            let g = load(&a.graph)?;
            let x = prim_space(&ideal_lattice(&g, limits)?)?;
            let m = filtered_xk(&g, &x, None)?;
            Ok(Outcome::ok(render(&m, m.table()), true))
        }
        Command::Splice(t) => {
            let g = load(&t.graph)?;
            let s = cuntz_splice(&g, &t.vertex)?;
            Ok(Outcome::ok(s.graph.to_json(), true))
        }
        Command::Verify { target, broken_psi } => {
            let g = load(&target.graph)?;
            let options = VerifyOptions {
                psi: if *broken_psi { PsiVariant::SignFlipped } else { PsiVariant::Correct },
                verbose: cli.verbose,
            };
            let r = verify_cuntz_splice_invariance(&g, &target.vertex, limits, options)?;
            let text = if cli.verbose { json(&r) } else { r.summary() };
            Ok(Outcome::ok(render(&r, text), r.verdict))
        }
        Command::Desing { graph, depth, order } => {
            let g = load(&graph.graph)?;
            let orders = load_orders(&g, order.as_deref())?;
            let d = desingularize_truncated(&g, &orders, *depth)?;
            Ok(Outcome::ok(json(&d), true))
        }
        Command::Commute { target, depth, order } => {
            let g = load(&target.graph)?;
            let orders = load_orders(&g, order.as_deref())?;
            let r = verify_desing_splice_commutes(&g, &target.vertex, &orders, *depth, limits)?;
            let text = format!(
                "commutes at {} (depth {}): {}\n  two return paths after desingularization: {}\n  isomorphic after stripping frontiers: {} ({} vs {} vertices)\n",
                r.vertex,
                r.depth,
                r.verdict,
                r.two_return_paths_after_desing,
                r.isomorphic,
                r.compared_sizes.0,
                r.compared_sizes.1
            );
            Ok(Outcome::ok(render(&r, text), r.verdict))
        }
        Command::Fuzz {
            seed,
            trials,
            max_vertices,
            max_mult,
            dump_dir,
            broken_psi,
        } => {
            if *max_vertices == 0 || *max_mult == 0 {
                return Err(Error::Structure("--max-vertices and --max-mult must be at least 1".into()));
            }
            let cfg = FuzzConfig {
                seed: *seed,
                trials: *trials,
                max_vertices: *max_vertices,
                max_mult: *max_mult,
                psi: if *broken_psi { PsiVariant::SignFlipped } else { PsiVariant::Correct },
            };
            let s = fuzz_run(&cfg, limits, dump_dir.as_deref())?;
            let mut text = format!(
                "trials {}  passed {}  failed {}  skipped {}\n",
                s.trials, s.passed, s.failed, s.skipped
            );
            for p in &s.dumped {
                let _ = writeln!(text, "  dumped {}", p.display());
            }
            Ok(Outcome::ok(render(&s, text), s.failed == 0))
        }
        Command::Dot { graph, hasse } => {
            let g = load(&graph.graph)?;
            let text = if *hasse { ideal_lattice(&g, limits)?.to_dot() } else { g.to_dot() };
            Ok(Outcome::ok(text, true))
        }
    }
}

mod erased {
    use serde::Serialize;

    pub trait Render {
        fn json(&self) -> String;
    }

    impl<T: Serialize> Render for T {
        fn json(&self) -> String {
            super::json(self)
        }
    }
}
