use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use kkm_core::cake::{divide as divide_cake, AllocationJson, CakeJson};
use kkm_core::cover::{falsify_weak_cover, CoverOracle, ViolationCertificate};
use kkm_core::d_interval::{
    interval_cover_oracle, pierce as pierce_instance, separated_cover_oracle, HypothesisFailure, InstanceJson,
    PierceOptions, Variant,
};
use kkm_core::hypergraph::{Hypergraph, HypergraphJson};
use kkm_core::polytope::default_anchors;
use kkm_core::solver::{solve_with, SolveOptions};
use kkm_core::wire::{point_to_json, JsonRat};
use kkm_core::{Error, PolytopeModel, Rat};

use crate::input::ProblemJson;
use crate::Common;

const OK: u8 = 0;
const VIOLATION: u8 = 2;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(common: &Common, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match &common.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn rat_json(r: &Rat) -> Value {
    JsonRat::from(r).to_value()
}

fn violation_json(v: &ViolationCertificate, polytope: &PolytopeModel) -> Value {
    json!({
        "violation": {
            "point": point_to_json(&v.point),
            "colors": v.subset,
            "support": polytope.support_vertices(v.support),
        }
    })
}

fn hypothesis_json(h: &HypothesisFailure) -> Value {
    json!({
        "hypothesis_violation": {
            "subset": h.subset,
            "required": h.required,
            "piercing": h.piercing.iter().map(rat_json).collect::<Vec<_>>(),
        }
    })
}

fn default_eps() -> Rat {
    Rat::new(1.into(), 8.into())
}

pub fn solve_kkm(common: &Common) -> Result<u8> {
    let problem = read_json::<ProblemJson>(&common.input)?.build()?;
    let eps = common.eps.clone().unwrap_or_else(default_eps);
    let mut opts = SolveOptions::default();
    opts.elimination.collect_trace = common.trace;
    if common.unchecked {
        opts.elimination.check_claims = false;
    }
    match solve_with(problem.polytope.clone(), &problem.cover, &problem.anchors, &eps, &opts) {
        Ok(sol) => {
            sol.certificate
                .validate(&problem.polytope, &problem.cover, &problem.anchors, problem.polytope.reference_point())
                .context("certificate failed re-validation")?;
            let mut out = json!({
                "certificate": sol.certificate.to_json(&problem.polytope),
                "initial_bad_edges": sol.report.initial_bad,
                "cells": sol.triangulation.cells().len(),
            });
            if common.trace {
                out["trace"] = serde_json::to_value(&sol.report.trace)?;
            }
            emit(common, &out)?;
            Ok(OK)
        }
        Err(Error::CoverViolation(v)) => {
            if !v.revalidate(&problem.cover, &problem.polytope)? {
                anyhow::bail!("violation certificate failed re-validation");
            }
            emit(common, &violation_json(&v, &problem.polytope))?;
            Ok(VIOLATION)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn check_cover(common: &Common, m: Option<usize>, samples: usize) -> Result<u8> {
    let problem = read_json::<ProblemJson>(&common.input)?.build()?;
    let m = m.unwrap_or(problem.polytope.dim() + 1);
    match falsify_weak_cover(&problem.cover, &problem.polytope, m, samples, common.seed)? {
        Some(v) => {
            emit(common, &violation_json(&v, &problem.polytope))?;
            Ok(VIOLATION)
        }
        None => {
            emit(common, &json!({ "violation": null, "m": m, "samples": samples, "seed": common.seed }))?;
            Ok(OK)
        }
    }
}

pub fn pierce(common: &Common) -> Result<u8> {
    let instance = read_json::<InstanceJson>(&common.input)?.into_instance()?;
    let mut opts = PierceOptions::default();
    if common.unchecked {
        opts.solve.elimination.check_claims = false;
    }
    let out = match pierce_instance(&instance, common.eps.clone(), &opts) {
        Ok(out) => out,
        Err(Error::HypothesisViolation(h)) => {
            emit(common, &hypothesis_json(&h))?;
            return Ok(VIOLATION);
        }
        Err(Error::CoverViolation(v)) => {
            emit(common, &violation_json(&v, &PolytopeModel::simplex(instance.k())?))?;
            return Ok(VIOLATION);
        }
        Err(e) => return Err(e.into()),
    };
    out.matching.validate(&instance).context("matching failed re-validation")?;
    let norm = instance.normalized();
    let oracle: Box<dyn CoverOracle> = match instance.variant {
        Variant::General { .. } => Box::new(interval_cover_oracle(&norm, &out.polytope)?),
        Variant::Separated { .. } => Box::new(separated_cover_oracle(&norm, &out.polytope)?),
    };
    let anchors = default_anchors(&out.polytope, instance.n());
    out.certificate
        .validate(&out.polytope, oracle.as_ref(), &anchors, out.polytope.reference_point())
        .context("certificate failed re-validation")?;
    let value = json!({
        "matching": out.matching,
        "size": out.matching.len(),
        "bound": instance.matching_bound(),
        "points": out.points.iter().map(point_to_json).collect::<Vec<_>>(),
        "faces": out.matched_faces,
        "certificate": out.certificate.to_json(&out.polytope),
        "eps": rat_json(&out.eps),
    });
    emit(common, &value)?;
    Ok(OK)
}

pub fn divide(common: &Common) -> Result<u8> {
    let problem = read_json::<CakeJson>(&common.input)?.into_problem()?;
    let eps = common.eps.clone().unwrap_or_else(default_eps);
    let alloc = divide_cake(&problem, &eps)?;
    alloc.validate(&problem).context("allocation failed re-validation")?;
    let polytope = problem.polytope()?;
    let value = json!({
        "allocation": AllocationJson::from_allocation(&alloc),
        "bound": problem.allocation_bound(),
        "certificate": alloc.certificate.to_json(&polytope),
    });
    emit(common, &value)?;
    Ok(OK)
}

pub fn hypergraph(common: &Common) -> Result<u8> {
    let h = Hypergraph::from_json(read_json::<HypergraphJson>(&common.input)?)?;
    let d = h.parts().map_or(h.rank(), <[Vec<usize>]>::len).max(1);
    let nu_star = h.fractional_matching_number()?;
    let perfect = h.has_perfect_fractional_matching()?;
    let mut value = json!({
        "vertices": h.num_vertices(),
        "edges": h.edges().len(),
        "rank": h.rank(),
        "nu": h.matching_number()?,
        "tau": h.covering_number()?,
        "nu_star": rat_json(&nu_star),
        "perfect_fractional_matching": perfect,
        "maximum_matching": h.maximum_matching()?,
        "minimum_cover": h.minimum_cover()?,
        "d": d,
        "partite": h.parts().is_some(),
    });
    if let Ok(b) = h.furedi_matching_bound(d) {
        value["furedi_bound"] = rat_json(&b);
    }
    if perfect {
        value["vertices_over_d"] = rat_json(&h.rank_lower_bound_nustar(d)?);
    }
    emit(common, &value)?;
    Ok(OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use kkm_core::polytope::Support;
    use kkm_core::RatPoint;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn rationals_are_pairs() {
        assert_eq!(rat_json(&r(6, 4)), json!([3, 2]));
        assert_eq!(rat_json(&r(-2, 1)), json!([-2, 1]));
    }

    #[test]
    fn violation_shape() {
        let p = PolytopeModel::simplex(2).unwrap();
        let v = ViolationCertificate { point: RatPoint::new(vec![r(1, 1), r(0, 1)]), subset: vec![1], support: Support::Whole };
        let j = violation_json(&v, &p);
        assert_eq!(j["violation"]["colors"], json!([1]));
        assert_eq!(j["violation"]["point"], json!([[1, 1], [0, 1]]));
        assert_eq!(j["violation"]["support"], json!([0, 1]));
    }

    #[test]
    fn hypothesis_shape() {
        let h = HypothesisFailure { subset: vec![0, 2], required: 3, piercing: vec![r(1, 2)] };
        let j = hypothesis_json(&h);
        assert_eq!(j["hypothesis_violation"]["required"], 3);
        assert_eq!(j["hypothesis_violation"]["piercing"], json!([[1, 2]]));
    }
}
