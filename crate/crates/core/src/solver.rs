//! The end-to-end pipeline: refine to diameter `eps`, make the labeling good,
//! find a maximal simplex whose anchors capture the reference point, and
//! package the result as a self-checking certificate.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::bad_edge::{make_good, EliminationOptions, Labeling, MakeGoodReport};
use crate::cover::CoverOracle;
use crate::error::{Error, Result};
use crate::exact_math::{in_convex_hull, Rat, RatPoint};
use crate::polytope::{AnchorTable, FaceId, PolytopeModel};
use crate::triangulation::{Triangulation, VertexId};
use crate::wire::{point_to_json, JsonRat};

/// A maximal simplex `σ` of diameter at most `eps` whose `i`-th vertex lies in
/// `A^{π(i)}_{τ_i}`, with `p = Σ c_i y^{π(i)}_{τ_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveCertificate {
    pub pi: Vec<usize>,
    pub faces: Vec<FaceId>,
    pub witness: Vec<VertexId>,
    pub witness_points: Vec<RatPoint>,
    pub coeffs: Vec<Rat>,
    pub eps: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub pi: Vec<usize>,
    pub faces: Vec<Vec<usize>>,
    pub witness: Vec<Vec<JsonRat>>,
    pub coeffs: Vec<JsonRat>,
    pub eps: JsonRat,
}

impl SolveCertificate {
    /// Exact re-check of injectivity, memberships, the hull identity, and the diameter bound.
    pub fn validate(
        &self,
        polytope: &PolytopeModel,
        oracle: &dyn CoverOracle,
        anchors: &AnchorTable,
        p: &RatPoint,
    ) -> Result<()> {
        let k = polytope.dim() + 1;
        let lens = [self.pi.len(), self.faces.len(), self.witness_points.len(), self.coeffs.len()];
        if lens.iter().any(|&l| l != k) {
            return Err(Error::InvariantViolation(format!("certificate sizes {lens:?}, expected {k}")));
        }
        if self.pi.iter().collect::<BTreeSet<_>>().len() != k {
            return Err(Error::InvariantViolation(format!("pi {:?} is not injective", self.pi)));
        }
        for i in 0..k {
            if !oracle.contains(self.pi[i], self.faces[i], &self.witness_points[i]) {
                return Err(Error::InvariantViolation(format!("witness vertex {i} is not in its set")));
            }
        }
        if self.coeffs.iter().any(Signed::is_negative) || self.coeffs.iter().sum::<Rat>() != Rat::one() {
            return Err(Error::InvariantViolation("coefficients are not a convex combination".into()));
        }
        let ys: Vec<RatPoint> = (0..k).map(|i| anchors.get(self.pi[i], self.faces[i]).clone()).collect();
        if &RatPoint::combination(&self.coeffs, &ys)? != p {
            return Err(Error::InvariantViolation("anchor combination misses the reference point".into()));
        }
        let eps2 = &self.eps * &self.eps;
        for i in 0..k {
            for j in i + 1..k {
                if self.witness_points[i].squared_distance(&self.witness_points[j])? > eps2 {
                    return Err(Error::InvariantViolation(format!("witness vertices {i}, {j} are farther than eps")));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self, polytope: &PolytopeModel) -> CertificateJson {
        CertificateJson {
            pi: self.pi.clone(),
            faces: self.faces.iter().map(|&f| polytope.face(f).vertex_ids.clone()).collect(),
            witness: self.witness_points.iter().map(point_to_json).collect(),
            coeffs: self.coeffs.iter().map(JsonRat::from).collect(),
            eps: JsonRat(self.eps.clone()),
        }
    }
}

/// First maximal simplex (in insertion order) whose anchor points contain `p`
/// in their convex hull, with the hull coefficients.
pub fn panchromatic_search(tri: &Triangulation, lab: &Labeling, p: &RatPoint) -> Result<(usize, Vec<Rat>)> {
    for (c, cell) in tri.cells().iter().enumerate() {
        let ys: Vec<RatPoint> = cell.iter().map(|&v| lab.anchor[v].clone()).collect();
        if !in_bounding_box(p, &ys) {
            continue;
        }
        if let Some(coeffs) = in_convex_hull(p, &ys)? {
            return Ok((c, coeffs));
        }
    }
    Err(Error::Internal("no maximal simplex captures the reference point; the labeling is not admissible".into()))
}

fn in_bounding_box(p: &RatPoint, ys: &[RatPoint]) -> bool {
    (0..p.dim()).all(|c| {
        let lo = ys.iter().map(|y| &y[c]).min().expect("nonempty cell");
        let hi = ys.iter().map(|y| &y[c]).max().expect("nonempty cell");
        lo <= &p[c] && &p[c] <= hi
    })
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub elimination: EliminationOptions,
}

/// Everything produced by one solve.
#[derive(Clone, Debug)]
pub struct Solution {
    pub certificate: SolveCertificate,
    pub triangulation: Triangulation,
    pub labeling: Labeling,
    pub report: MakeGoodReport,
    /// Index of the witness cell in the triangulation.
    pub cell: usize,
}

/// Runs the pipeline on the polytope's reference point and returns a validated certificate.
pub fn solve(
    polytope: Arc<PolytopeModel>,
    oracle: &dyn CoverOracle,
    anchors: &AnchorTable,
    eps: &Rat,
) -> Result<SolveCertificate> {
    Ok(solve_with(polytope, oracle, anchors, eps, &SolveOptions::default())?.certificate)
}

pub fn solve_with(
    polytope: Arc<PolytopeModel>,
    oracle: &dyn CoverOracle,
    anchors: &AnchorTable,
    eps: &Rat,
    opts: &SolveOptions,
) -> Result<Solution> {
    let mut tri = Triangulation::initial(polytope)?;
    tri.refine_to_diameter(eps)?;
    solve_on(tri, oracle, anchors, eps, opts)
}

/// Runs labeling and search on a given triangulation of diameter at most `eps`.
pub fn solve_on(
    tri: Triangulation,
    oracle: &dyn CoverOracle,
    anchors: &AnchorTable,
    eps: &Rat,
    opts: &SolveOptions,
) -> Result<Solution> {
    if !eps.is_positive() {
        return Err(Error::invalid(format!("eps must be positive, got {eps}")));
    }
    let polytope = tri.polytope().clone();
    let k = polytope.dim() + 1;
    if oracle.colors() < k {
        return Err(Error::invalid(format!("need at least k = {k} colors, oracle has {}", oracle.colors())));
    }
    anchors.validate(&polytope)?;
    let (tri, lab, report) = make_good(tri, oracle, anchors, &opts.elimination)?;
    let p = polytope.reference_point().clone();
    let (cell, coeffs) = panchromatic_search(&tri, &lab, &p)?;
    let witness = tri.cells()[cell].clone();
    let certificate = SolveCertificate {
        pi: witness.iter().map(|&v| lab.color[v]).collect(),
        faces: witness.iter().map(|&v| lab.lambda[v]).collect(),
        witness_points: witness.iter().map(|&v| tri.vertex(v).clone()).collect(),
        witness,
        coeffs,
        eps: eps.clone(),
    };
    certificate.validate(&polytope, oracle, anchors, &p)?;
    Ok(Solution { certificate, triangulation: tri, labeling: lab, report, cell })
}
