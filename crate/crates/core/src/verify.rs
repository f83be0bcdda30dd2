//! The length-one chain complexes of a graph and of its Cuntz splice over the
//! primitive ideal space, the explicit chain map between them, and checks
//! that this map commutes with all structure maps and is a
//! quasi-isomorphism at every point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, ReturnPathClass};
use crate::ideals::{prim_homeo_under_splice, PrimSpace};
use crate::linalg::{induced_coker_iso, induced_ker_iso, kernel_basis, IntMatrix};
use crate::moves::cuntz_splice_at;
use crate::xk::{
    first_singular, graded_groups_isomorphic, inclusion, point_enumeration, transposed_minus_identity,
    GradedGroup,
};
use crate::{FgAbelianGroup, Limits};

/// `φ_x : ℤ^{H_x} → ℤ^{H_x}` at every point, with the coordinate inclusions
/// along the order.
#[derive(Debug, Clone, Serialize)]
pub struct DiagramComplex {
    pub space: PrimSpace,
    #[serde(skip)]
    pub enum_of: Vec<Vec<usize>>,
    pub phi: Vec<IntMatrix>,
    /// `((x, y), ι)` for every `x ≥ y`, `x ≠ y`.
    pub incl: Vec<((usize, usize), IntMatrix)>,
}

impl DiagramComplex {
    pub fn rank_of(&self, x: usize) -> usize {
        self.enum_of[x].len()
    }

    pub fn inclusion(&self, x: usize, y: usize) -> Option<&IntMatrix> {
        self.incl.iter().find(|((a, b), _)| *a == x && *b == y).map(|(_, m)| m)
    }

    /// Homology `(coker φ_x, ker φ_x)`.
    pub fn homology(&self, x: usize) -> GradedGroup {
        GradedGroup::of_matrix(&self.phi[x])
    }
}

/// Builds the complex of an all-regular graph. Vertices of `lead` come first,
/// in the given order, in every `H_x` that contains them.
pub fn build_complex(g: &Graph, space: &PrimSpace, lead: &[usize]) -> Result<DiagramComplex> {
    if let Some(s) = first_singular(g) {
        return Err(Error::SingularVertex(g.name(s).to_string()));
    }
    let enum_of: Vec<Vec<usize>> = (0..space.len())
        .map(|x| point_enumeration(space, x, lead))
        .collect::<Result<_>>()?;
    let phi: Vec<IntMatrix> = enum_of.iter().map(|e| transposed_minus_identity(g, e, e)).collect();
    let mut incl = Vec::new();
    for (x, y) in space.strict_pairs() {
        let i = inclusion(&enum_of[x], &enum_of[y])?;
        if &i * &phi[x] != &phi[y] * &i {
            return Err(Error::Inconsistent(format!("φ is not a module map along x{x} -> x{y}")));
        }
        incl.push(((x, y), i));
    }
    Ok(DiagramComplex {
        space: space.clone(),
        enum_of,
        phi,
        incl,
    })
}

/// Which `ψ₀` to build. `SignFlipped` is a negative control.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum PsiVariant {
    #[default]
    Correct,
    SignFlipped,
}

/// `ψ₁, ψ₀ : P^{E_C} → P^E` at every point.
#[derive(Debug, Clone, Serialize)]
pub struct ChainMap {
    pub psi1: Vec<IntMatrix>,
    pub psi0: Vec<IntMatrix>,
}

/// At points containing `v`: `ψ₁ = [0 0 | 1]` and `ψ₀` the same with an extra
/// `−1` in the `(v, u₂)` entry, for the enumerations `(v, …)` and
/// `(u₂, u₁, v, …)`. Identities elsewhere.
pub fn build_psi(g: &Graph, v: usize, space: &PrimSpace) -> Result<ChainMap> {
    build_psi_variant(g, v, space, PsiVariant::Correct)
}

pub fn build_psi_variant(g: &Graph, v: usize, space: &PrimSpace, variant: PsiVariant) -> Result<ChainMap> {
    if let Some(s) = first_singular(g) {
        return Err(Error::SingularVertex(g.name(s).to_string()));
    }
    let class = g.return_path_class_at(v, &g.reachability());
    if class != ReturnPathClass::TwoOrMore {
        return Err(Error::SpliceVertex {
            vertex: g.name(v).to_string(),
            class,
        });
    }
    let corner: i64 = match variant {
        PsiVariant::Correct => -1,
        PsiVariant::SignFlipped => 1,
    };
    let mut psi1 = Vec::with_capacity(space.len());
    let mut psi0 = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        let n = space.h_of(x).len();
        if !space.h_of(x).contains(&v) {
            psi1.push(IntMatrix::identity(n));
            psi0.push(IntMatrix::identity(n));
            continue;
        }
        let mut p1 = IntMatrix::zeros(n, n + 2);
        for i in 0..n {
            p1.set(i, i + 2, 1.into());
        }
        let mut p0 = p1.clone();
        p0.set(0, 0, corner.into());
        psi1.push(p1);
        psi0.push(p0);
    }
    Ok(ChainMap { psi1, psi0 })
}

/// Faces of the cube over a pair `x ≥ y`.
#[derive(Debug, Clone, Serialize)]
pub struct PairFaces {
    pub from: usize,
    pub to: usize,
    /// `φ^E` commutes with the inclusions.
    pub front: bool,
    /// `φ^{E_C}` commutes with the inclusions.
    pub back: bool,
    /// `ψ₁` commutes with the inclusions.
    pub left: bool,
    /// `ψ₀` commutes with the inclusions.
    pub right: bool,
    /// Chain-map square at `x`.
    pub top: bool,
    /// Chain-map square at `y`.
    pub bottom: bool,
}

impl PairFaces {
    pub fn all(&self) -> bool {
        self.front && self.back && self.left && self.right && self.top && self.bottom
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CubeReport {
    /// `φ^E_x · ψ₁(x) = ψ₀(x) · φ^{E_C}_x` at each point.
    pub chain_map_at: Vec<bool>,
    pub pairs: Vec<PairFaces>,
    pub verdict: bool,
}

fn product(op: &'static str, a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    a.checked_mul(b).ok_or_else(|| Error::Dimension {
        op,
        detail: format!("{}x{} times {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
    })
}

fn commutes(op: &'static str, a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, d: &IntMatrix) -> Result<bool> {
    Ok(product(op, a, b)? == product(op, c, d)?)
}

/// `ce` and `cec` must be indexed by the same points (the spliced space
/// aligned along the splice bijection).
pub fn verify_cube(ce: &DiagramComplex, cec: &DiagramComplex, psi: &ChainMap) -> Result<CubeReport> {
    let n = ce.space.len();
    if cec.space.len() != n || psi.psi0.len() != n || psi.psi1.len() != n {
        return Err(Error::Dimension {
            op: "commuting cube",
            detail: "complexes and chain map have different point counts".into(),
        });
    }
    let chain_map_at: Vec<bool> = (0..n)
        .map(|x| commutes("top face", &ce.phi[x], &psi.psi1[x], &psi.psi0[x], &cec.phi[x]))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for (x, y) in ce.space.strict_pairs() {
        let (Some(ie), Some(iec)) = (ce.inclusion(x, y), cec.inclusion(x, y)) else {
            return Err(Error::Dimension {
                op: "commuting cube",
                detail: format!("missing inclusion for x{x} -> x{y}"),
            });
        };
        pairs.push(PairFaces {
            from: x,
            to: y,
            front: commutes("front face", ie, &ce.phi[x], &ce.phi[y], ie)?,
            back: commutes("back face", iec, &cec.phi[x], &cec.phi[y], iec)?,
            left: commutes("left face", ie, &psi.psi1[x], &psi.psi1[y], iec)?,
            right: commutes("right face", ie, &psi.psi0[x], &psi.psi0[y], iec)?,
            top: chain_map_at[x],
            bottom: chain_map_at[y],
        });
    }
    let verdict = chain_map_at.iter().all(|&b| b) && pairs.iter().all(PairFaces::all);
    Ok(CubeReport {
        chain_map_at,
        pairs,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PointQuasiIso {
    pub point: usize,
    pub ker_iso: bool,
    pub coker_iso: bool,
    /// A kernel vector of `φ^{E_C}_x` killed by `ψ₁` is zero.
    pub ker_injective: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiIsoReport {
    pub points: Vec<PointQuasiIso>,
    pub verdict: bool,
}

pub fn verify_quasi_iso(ce: &DiagramComplex, cec: &DiagramComplex, psi: &ChainMap) -> Result<QuasiIsoReport> {
    let mut points = Vec::new();
    for x in 0..ce.space.len() {
        let ker_iso = induced_ker_iso(&psi.psi1[x], &cec.phi[x], &ce.phi[x])?;
        let coker_iso = induced_coker_iso(&psi.psi0[x], &cec.phi[x], &ce.phi[x])?;
        let k = kernel_basis(&cec.phi[x]);
        let ker_injective = kernel_basis(&product("kernel restriction", &psi.psi1[x], &k)?).cols() == 0;
        points.push(PointQuasiIso {
            point: x,
            ker_iso,
            coker_iso,
            ker_injective,
        });
    }
    let verdict = points.iter().all(|p| p.ker_iso && p.coker_iso && p.ker_injective);
    Ok(QuasiIsoReport { points, verdict })
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointSummary {
    pub point: usize,
    #[serde(rename = "H")]
    pub h: Vec<String>,
    #[serde(rename = "H_spliced")]
    pub h_spliced: Vec<String>,
    pub k0: FgAbelianGroup,
    pub k1: FgAbelianGroup,
    pub k0_spliced: FgAbelianGroup,
    pub k1_spliced: FgAbelianGroup,
    pub groups_match: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointMatrices {
    pub point: usize,
    pub phi: IntMatrix,
    pub phi_spliced: IntMatrix,
    pub psi1: IntMatrix,
    pub psi0: IntMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub vertex: String,
    pub u1: String,
    pub u2: String,
    pub psi: PsiVariant,
    pub stages: Vec<Stage>,
    pub points: Vec<PointSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cube: Option<CubeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quasi_iso: Option<QuasiIsoReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<PointMatrices>>,
    pub verdict: bool,
}

impl VerifyReport {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "splice at {} (new vertices {}, {}): {}\n",
            self.vertex,
            self.u1,
            self.u2,
            if self.verdict { "PASS" } else { "FAIL" }
        );
        for st in &self.stages {
            s.push_str(&format!("  [{}] {}", if st.passed { "ok" } else { "FAIL" }, st.name));
            if let Some(d) = &st.detail {
                s.push_str(&format!(": {d}"));
            }
            s.push('\n');
        }
        for p in &self.points {
            s.push_str(&format!(
                "  x{}  H = {{{}}}  K0 = {} / {}  K1 = {} / {}\n",
                p.point,
                p.h.join(", "),
                p.k0,
                p.k0_spliced,
                p.k1,
                p.k1_spliced
            ));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub psi: PsiVariant,
    /// Include all matrices in the report.
    pub verbose: bool,
}

/// Checks every precondition, then runs the full pipeline: splice, lattice
/// isomorphism, point bijection, both complexes, `ψ`, the cube and the
/// homology isomorphisms, and a pointwise comparison of groups.
pub fn verify_cuntz_splice_invariance(
    g: &Graph,
    v: &str,
    limits: &Limits,
    options: VerifyOptions,
) -> Result<VerifyReport> {
    let vi = g.index_of(v)?;
    if let Some(s) = first_singular(g) {
        return Err(Error::SingularVertex(g.name(s).to_string()));
    }
    let pi = g.purely_infinite_report(limits)?;
    if let Some(criterion) = pi.failing_criterion() {
        return Err(Error::NotPurelyInfinite { criterion });
    }
    let spliced = cuntz_splice_at(g, vi)?;
    let mut report = VerifyReport {
        vertex: v.to_string(),
        u1: spliced.u1_name().to_string(),
        u2: spliced.u2_name().to_string(),
        psi: options.psi,
        stages: vec![Stage {
            name: "splice",
            passed: true,
            detail: None,
        }],
        points: Vec::new(),
        cube: None,
        quasi_iso: None,
        matrices: None,
        verdict: false,
    };

    let homeo = match prim_homeo_under_splice(g, v, limits) {
        Ok(h) => h,
        Err(Error::Inconsistent(detail)) => {
            report.stages.push(Stage {
                name: "ideal lattice and primitive ideal space isomorphism",
                passed: false,
                detail: Some(detail),
            });
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.stages.push(Stage {
        name: "ideal lattice and primitive ideal space isomorphism",
        passed: true,
        detail: Some(format!("{} points", homeo.source.len())),
    });

    let xe = &homeo.source;
    let xec = homeo.aligned_target();
    let ce = build_complex(g, xe, &[vi])?;
    let cec = build_complex(&spliced.graph, &xec, &[spliced.u2, spliced.u1, vi])?;
    let psi = build_psi_variant(g, vi, xe, options.psi)?;
    report.stages.push(Stage {
        name: "complexes and chain map",
        passed: true,
        detail: None,
    });

    let cube = verify_cube(&ce, &cec, &psi)?;
    report.stages.push(Stage {
        name: "commuting cube",
        passed: cube.verdict,
        detail: None,
    });
    let cube_ok = cube.verdict;
    report.cube = Some(cube);

    let mut homology_ok = false;
    if cube_ok {
        let qi = verify_quasi_iso(&ce, &cec, &psi)?;
        homology_ok = qi.verdict;
        report.stages.push(Stage {
            name: "isomorphism on homology",
            passed: qi.verdict,
            detail: None,
        });
        report.quasi_iso = Some(qi);
    } else {
        report.stages.push(Stage {
            name: "isomorphism on homology",
            passed: false,
            detail: Some("skipped: the chain map does not commute".into()),
        });
    }

    let mut groups_ok = true;
    for x in 0..xe.len() {
        let (a, b) = (ce.homology(x), cec.homology(x));
        let groups_match = graded_groups_isomorphic(&a, &b);
        groups_ok &= groups_match;
        report.points.push(PointSummary {
            point: x,
            h: g.names_of(&ce.enum_of[x]),
            h_spliced: spliced.graph.names_of(&cec.enum_of[x]),
            k0: a.k0,
            k1: a.k1,
            k0_spliced: b.k0,
            k1_spliced: b.k1,
            groups_match,
        });
    }
    report.stages.push(Stage {
        name: "pointwise filtered groups",
        passed: groups_ok,
        detail: None,
    });

    if options.verbose {
        report.matrices = Some(
            (0..xe.len())
                .map(|x| PointMatrices {
                    point: x,
                    phi: ce.phi[x].clone(),
                    phi_spliced: cec.phi[x].clone(),
                    psi1: psi.psi1[x].clone(),
                    psi0: psi.psi0[x].clone(),
                })
                .collect(),
        );
    }
    report.verdict = cube_ok && homology_ok && groups_ok;
    Ok(report)
}
