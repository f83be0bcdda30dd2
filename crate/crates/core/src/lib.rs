//! Exact combinatorial and K-theoretic invariants of finite directed graphs.
//!
//! The crate computes, for a finite graph `E` with edge multiplicities in
//! `ℕ ∪ {ω}`:
//!
//! * vertex classes, return paths, Condition (K), breaking vertices, maximal
//!   tails and the pure-infiniteness criteria ([`graph`]);
//! * the Cuntz splice, truncated desingularization, single-vertex contraction
//!   and small-graph isomorphism ([`moves`]);
//! * hereditary saturated sets, admissible pairs, the ideal lattice and its
//!   join-irreducible points ([`ideals`]);
//! * Smith normal forms, kernels, cokernels and induced-map tests over ℤ
//!   ([`linalg`]);
//! * K-theory and the filtered invariant over the primitive ideal space
//!   ([`xk`]);
//! * the length-one chain complexes of a graph and its Cuntz splice together
//!   with an explicit chain map between them, checked face by face and on
//!   homology ([`verify`]).
//!
//! Everything is exact: integers are arbitrary precision and every
//! enumeration is exhaustive under an explicit size bound ([`Limits`]).

pub mod cli;
pub mod error;
pub mod graph;
pub mod harness;
pub mod ideals;
pub mod linalg;
pub mod moves;
pub mod verify;
pub mod xk;

pub use error::{Error, Result};
pub use graph::{ExtNat, Graph, ReturnPathClass, VertexClass, VertexSet};
pub use linalg::{FgAbelianGroup, IntMatrix};

/// Environment variable overriding [`Limits::brute_force_vertices`].
pub const BRUTE_FORCE_ENV: &str = "GSPLICE_MAX_VERTICES";
/// Environment variable overriding [`Limits::isomorphism_vertices`].
pub const ISOMORPHISM_ENV: &str = "GSPLICE_MAX_ISO_VERTICES";

/// Size guards for exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest vertex count for subset enumerations (maximal tails,
    /// hereditary saturated sets). Never above 63.
    pub brute_force_vertices: usize,
    /// Largest vertex count accepted by the isomorphism search.
    pub isomorphism_vertices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            brute_force_vertices: 16,
            isomorphism_vertices: 24,
        }
    }
}

impl Limits {
    /// Defaults, overridden by the environment variables when set to a
    /// valid number.
    pub fn from_env() -> Self {
        let read = |key: &str| std::env::var(key).ok().and_then(|v| v.trim().parse::<usize>().ok());
        let d = Limits::default();
        Limits {
            brute_force_vertices: read(BRUTE_FORCE_ENV)
                .unwrap_or(d.brute_force_vertices)
                .min(63),
            isomorphism_vertices: read(ISOMORPHISM_ENV).unwrap_or(d.isomorphism_vertices),
        }
    }

    pub(crate) fn check_brute_force(&self, what: &'static str, size: usize) -> Result<()> {
        let bound = self.brute_force_vertices.min(63);
        if size > bound {
            return Err(Error::SizeBound { what, size, bound });
        }
        Ok(())
    }

    pub(crate) fn check_isomorphism(&self, size: usize) -> Result<()> {
        if size > self.isomorphism_vertices {
            return Err(Error::SizeBound {
                what: "graph isomorphism",
                size,
                bound: self.isomorphism_vertices,
            });
        }
        Ok(())
    }
}
