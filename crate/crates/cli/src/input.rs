//! Input formats for `solve-kkm` and `check-cover`: a polytope, a built-in
//! cover, and optional anchors.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use kkm_core::cover::{Halfspace, PolyhedralCover};
use kkm_core::polytope::{default_anchors, SuppliedTriangulation};
use kkm_core::wire::{point_from_json, JsonRat};
use kkm_core::{AnchorTable, FaceId, PolytopeModel, Rat};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum PolytopeJson {
    Simplex { simplex: usize },
    Product { product: Vec<usize> },
    Custom(CustomPolytopeJson),
}

/// `{ "vertices": [[r, ...], ...], "faces": [[ids], ...], "p": [r, ...], "triangulation": {...} }`.
#[derive(Debug, Deserialize)]
pub struct CustomPolytopeJson {
    pub vertices: Vec<Vec<JsonRat>>,
    pub faces: Vec<Vec<usize>>,
    #[serde(default)]
    pub p: Option<Vec<JsonRat>>,
    #[serde(default)]
    pub triangulation: Option<TriangulationInput>,
}

#[derive(Debug, Deserialize)]
pub struct TriangulationInput {
    pub vertices: Vec<Vec<JsonRat>>,
    pub cells: Vec<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
pub struct HalfspaceJson {
    pub normal: Vec<JsonRat>,
    pub offset: JsonRat,
}

#[derive(Debug, Deserialize)]
pub struct PolyhedronJson {
    pub color: usize,
    /// Vertex ids of the indexing face.
    pub face: Vec<usize>,
    /// Intersection of `normal . x >= offset`; empty means the whole polytope.
    #[serde(default)]
    pub halfspaces: Vec<HalfspaceJson>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverJson {
    /// Every color gets `x_j >= 1/k` on the vertex faces of a simplex.
    GaleThreshold,
    /// Threshold `t` on the vertex faces for the listed colors only.
    Threshold { colors: Vec<usize>, t: JsonRat },
    ProductThreshold { colors: Vec<usize> },
    Polyhedral { sets: Vec<PolyhedronJson> },
}

#[derive(Debug, Deserialize)]
pub struct AnchorJson {
    pub color: usize,
    pub face: Vec<usize>,
    pub point: Vec<JsonRat>,
}

#[derive(Debug, Deserialize)]
pub struct ProblemJson {
    pub polytope: PolytopeJson,
    pub colors: usize,
    pub cover: CoverJson,
    #[serde(default)]
    pub anchors: Vec<AnchorJson>,
}

pub struct Problem {
    pub polytope: Arc<PolytopeModel>,
    pub cover: PolyhedralCover,
    pub anchors: AnchorTable,
}

fn face_id(polytope: &PolytopeModel, ids: &[usize]) -> Result<FaceId> {
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    polytope.face_by_vertices(&sorted).ok_or_else(|| anyhow!("{ids:?} is not a face of the polytope"))
}

fn points(raw: Vec<Vec<JsonRat>>) -> Vec<kkm_core::RatPoint> {
    raw.iter().map(|p| point_from_json(p)).collect()
}

impl ProblemJson {
    pub fn build(self) -> Result<Problem> {
        let polytope = Arc::new(match self.polytope {
            PolytopeJson::Simplex { simplex } => PolytopeModel::simplex(simplex)?,
            PolytopeJson::Product { product } => PolytopeModel::product_of_simplices(&product)?,
            PolytopeJson::Custom(c) => PolytopeModel::custom(
                points(c.vertices),
                c.faces,
                c.p.map(|p| point_from_json(&p)),
                c.triangulation.map(|t| SuppliedTriangulation { vertices: points(t.vertices), cells: t.cells }),
            )?,
        });
        let n = self.colors;
        let k = polytope.dim() + 1;
        if n < k {
            bail!("{n} colors given, the polytope needs at least {k}");
        }
        let cover = match self.cover {
            CoverJson::GaleThreshold => PolyhedralCover::gale_threshold(&polytope, n)?,
            CoverJson::Threshold { colors, t } => {
                let mut c = PolyhedralCover::new(n);
                c.add_threshold(&polytope, &colors, &t.0)?;
                c
            }
            CoverJson::ProductThreshold { colors } => PolyhedralCover::product_threshold(&polytope, n, &colors)?,
            CoverJson::Polyhedral { sets } => {
                let mut c = PolyhedralCover::new(n);
                let dim = polytope.ambient_dim();
                for set in sets {
                    let face = face_id(&polytope, &set.face)?;
                    let hs = set
                        .halfspaces
                        .into_iter()
                        .map(|h| {
                            let normal: Vec<Rat> = h.normal.into_iter().map(|r| r.0).collect();
                            if normal.len() != dim {
                                bail!("halfspace normal has {} entries, expected {dim}", normal.len());
                            }
                            Ok(Halfspace::new(normal, h.offset.0))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    c.add(set.color, face, hs)?;
                }
                c
            }
        };
        let mut anchors = default_anchors(&polytope, n);
        for a in self.anchors {
            let face = face_id(&polytope, &a.face)?;
            anchors
                .set(&polytope, a.color, face, point_from_json(&a.point))
                .with_context(|| format!("anchor for color {} on face {:?}", a.color, a.face))?;
        }
        Ok(Problem { polytope, cover, anchors })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(text: &str) -> Result<Problem> {
        serde_json::from_str::<ProblemJson>(text)?.build()
    }

    #[test]
    fn builtin_polytopes() {
        let p = build(r#"{ "polytope": { "simplex": 3 }, "colors": 3, "cover": { "kind": "gale_threshold" } }"#).unwrap();
        assert_eq!(p.polytope.dim(), 2);
        let p = build(r#"{ "polytope": { "product": [2, 2] }, "colors": 3, "cover": { "kind": "product_threshold", "colors": [0, 1, 2] } }"#)
            .unwrap();
        assert_eq!(p.polytope.ambient_dim(), 4);
    }

    #[test]
    fn polyhedral_and_anchors() {
        let text = r#"{
            "polytope": { "simplex": 2 }, "colors": 2,
            "cover": { "kind": "polyhedral", "sets": [
                { "color": 0, "face": [0], "halfspaces": [ { "normal": [[1,1],[0,1]], "offset": [1,2] } ] },
                { "color": 1, "face": [1] } ] },
            "anchors": [ { "color": 0, "face": [0], "point": [[1,1],[0,1]] } ]
        }"#;
        let p = build(text).unwrap();
        assert_eq!(p.cover.sets().len(), 2);
    }

    #[test]
    fn rejections() {
        assert!(build(r#"{ "polytope": { "simplex": 3 }, "colors": 2, "cover": { "kind": "gale_threshold" } }"#).is_err());
        let bad_face = r#"{ "polytope": { "simplex": 3 }, "colors": 3,
            "cover": { "kind": "polyhedral", "sets": [ { "color": 0, "face": [0, 1, 2] } ] } }"#;
        assert!(build(bad_face).is_err());
        let short_normal = r#"{ "polytope": { "simplex": 2 }, "colors": 2,
            "cover": { "kind": "polyhedral", "sets": [ { "color": 0, "face": [0], "halfspaces": [ { "normal": [1], "offset": 0 } ] } ] } }"#;
        assert!(build(short_normal).is_err());
        let off_face = r#"{ "polytope": { "simplex": 2 }, "colors": 2, "cover": { "kind": "gale_threshold" },
            "anchors": [ { "color": 0, "face": [0], "point": [[0,1],[1,1]] } ] }"#;
        assert!(build(off_face).is_err());
    }
}
