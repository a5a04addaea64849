//! Exact matching, covering, and fractional matching numbers of small hypergraphs.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_math::{LinearProgram, LpOutcome, Rat, Relation};

/// Default cap on the number of edges for the exponential searches.
pub const EDGE_CAP: usize = 20;

/// Vertex ids are `0..vertices`. Edges may repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    vertices: usize,
    edges: Vec<Vec<usize>>,
    parts: Option<Vec<Vec<usize>>>,
    edge_cap: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphJson {
    pub vertices: usize,
    pub edges: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<Vec<usize>>>,
}

impl Hypergraph {
    pub fn new(vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if vertices > 128 {
            return Err(Error::CapExceeded { what: "hypergraph vertices", cap: 128, found: vertices });
        }
        let mut clean = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::invalid("hypergraph edges must be nonempty"));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= vertices) {
                return Err(Error::invalid(format!("edge vertex {v} out of range 0..{vertices}")));
            }
            clean.push(e);
        }
        Ok(Hypergraph { vertices, edges: clean, parts: None, edge_cap: EDGE_CAP })
    }

    /// Declares a partition of the vertices; every edge must meet each part exactly once.
    pub fn with_parts(mut self, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; self.vertices];
        for part in &parts {
            for &v in part {
                if v >= self.vertices || seen[v] {
                    return Err(Error::invalid(format!("parts do not partition the vertices (vertex {v})")));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("parts do not cover every vertex"));
        }
        for e in &self.edges {
            for part in &parts {
                if e.iter().filter(|v| part.contains(v)).count() != 1 {
                    return Err(Error::invalid(format!("edge {e:?} does not meet part {part:?} exactly once")));
                }
            }
        }
        self.parts = Some(parts);
        Ok(self)
    }

    pub fn with_edge_cap(mut self, cap: usize) -> Self {
        self.edge_cap = cap;
        self
    }

    pub fn from_json(j: HypergraphJson) -> Result<Self> {
        let h = Hypergraph::new(j.vertices, j.edges)?;
        match j.parts {
            Some(p) => h.with_parts(p),
            None => Ok(h),
        }
    }

    pub fn to_json(&self) -> HypergraphJson {
        HypergraphJson { vertices: self.vertices, edges: self.edges.clone(), parts: self.parts.clone() }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn parts(&self) -> Option<&[Vec<usize>]> {
        self.parts.as_deref()
    }

    /// Largest edge size (0 without edges).
    pub fn rank(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn check_cap(&self, what: &'static str) -> Result<()> {
        if self.edges.len() > self.edge_cap {
            return Err(Error::CapExceeded { what, cap: self.edge_cap, found: self.edges.len() });
        }
        Ok(())
    }

    fn masks(&self) -> Vec<u128> {
        self.edges.iter().map(|e| e.iter().fold(0u128, |m, &v| m | 1 << v)).collect()
    }

    /// Indices of a maximum set of pairwise disjoint edges (lexicographically
    /// first among those found by the search).
    pub fn maximum_matching(&self) -> Result<Vec<usize>> {
        self.check_cap("matching_number")?;
        let masks = self.masks();
        let mut best = Vec::new();
        let mut current = Vec::new();
        matching_search(&masks, 0, 0, &mut current, &mut best);
        Ok(best)
    }

    pub fn matching_number(&self) -> Result<usize> {
        Ok(self.maximum_matching()?.len())
    }

    /// A minimum set of vertices meeting every edge.
    pub fn minimum_cover(&self) -> Result<Vec<usize>> {
        self.check_cap("covering_number")?;
        let masks = self.masks();
        let mut best: Option<Vec<usize>> = None;
        let mut chosen = Vec::new();
        cover_search(&masks, 0, &mut chosen, &mut best);
        let mut out = best.unwrap_or_default();
        out.sort_unstable();
        Ok(out)
    }

    pub fn covering_number(&self) -> Result<usize> {
        Ok(self.minimum_cover()?.len())
    }

    fn matching_lp(&self, relation: Relation) -> LinearProgram {
        let ne = self.edges.len();
        let mut lp = LinearProgram::new(ne).maximize(vec![Rat::one(); ne]);
        for v in 0..self.vertices {
            let row: Vec<Rat> =
                self.edges.iter().map(|e| if e.contains(&v) { Rat::one() } else { Rat::zero() }).collect();
            lp.constrain(row, relation, Rat::one());
        }
        lp
    }

    /// `ν*` with optimal edge weights.
    pub fn fractional_matching(&self) -> Result<(Rat, Vec<Rat>)> {
        if self.edges.is_empty() {
            return Ok((Rat::zero(), Vec::new()));
        }
        match self.matching_lp(Relation::Le).solve()? {
            LpOutcome::Optimal { value, solution } => Ok((value, solution)),
            LpOutcome::Infeasible => Err(Error::Internal("fractional matching LP is infeasible".into())),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }

    pub fn fractional_matching_number(&self) -> Result<Rat> {
        Ok(self.fractional_matching()?.0)
    }

    /// Weights with every vertex's incident sum exactly 1, if any exist.
    pub fn perfect_fractional_matching(&self) -> Result<Option<Vec<Rat>>> {
        if self.edges.is_empty() {
            return Ok((self.vertices == 0).then(Vec::new));
        }
        Ok(self.matching_lp(Relation::Eq).solve()?.solution().map(<[Rat]>::to_vec))
    }

    pub fn has_perfect_fractional_matching(&self) -> Result<bool> {
        Ok(self.perfect_fractional_matching()?.is_some())
    }

    /// `true` if `weights` are nonnegative with every vertex sum exactly 1.
    pub fn is_perfect_fractional_matching(&self, weights: &[Rat]) -> bool {
        weights.len() == self.edges.len()
            && weights.iter().all(|w| w >= &Rat::zero())
            && (0..self.vertices).all(|v| {
                let s: Rat = self.edges.iter().zip(weights).filter(|(e, _)| e.contains(&v)).map(|(_, w)| w).sum();
                s.is_one()
            })
    }

    /// Füredi's lower bound on `ν`: `ν*/(d - 1 + 1/d)`, or `ν*/(d - 1)` for a
    /// declared `d`-partition with `d >= 2`.
    pub fn furedi_matching_bound(&self, d: usize) -> Result<Rat> {
        if d == 0 || self.rank() > d {
            return Err(Error::invalid(format!("rank {} exceeds d = {d}", self.rank())));
        }
        let nu_star = self.fractional_matching_number()?;
        let d_rat = Rat::from_integer((d as i64).into());
        let partite = self.parts.as_ref().is_some_and(|p| p.len() == d) && d >= 2;
        let denom = if partite { &d_rat - Rat::one() } else { &d_rat - Rat::one() + d_rat.recip() };
        Ok(nu_star / denom)
    }

    /// `|V| / d`, which bounds `ν*` from below when a perfect fractional matching exists.
    pub fn rank_lower_bound_nustar(&self, d: usize) -> Result<Rat> {
        if d == 0 {
            return Err(Error::invalid("d must be positive"));
        }
        if !self.has_perfect_fractional_matching()? {
            return Err(Error::invalid("hypergraph has no perfect fractional matching"));
        }
        Ok(Rat::new((self.vertices as i64).into(), (d as i64).into()))
    }

    /// Distinct vertices that lie in some edge.
    pub fn covered_vertices(&self) -> BTreeSet<usize> {
        self.edges.iter().flatten().copied().collect()
    }
}

fn matching_search(masks: &[u128], from: usize, used: u128, current: &mut Vec<usize>, best: &mut Vec<usize>) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    if current.len() + (masks.len() - from) <= best.len() {
        return;
    }
    for i in from..masks.len() {
        if current.len() + (masks.len() - i) <= best.len() {
            return;
        }
        if masks[i] & used == 0 {
            current.push(i);
            matching_search(masks, i + 1, used | masks[i], current, best);
            current.pop();
        }
    }
}

fn cover_search(masks: &[u128], chosen_mask: u128, chosen: &mut Vec<usize>, best: &mut Option<Vec<usize>>) {
    if best.as_ref().is_some_and(|b| chosen.len() >= b.len()) {
        return;
    }
    // Branch on the vertices of the first edge not yet met.
    let Some(&open) = masks.iter().find(|&&m| m & chosen_mask == 0) else {
        *best = Some(chosen.clone());
        return;
    };
    let mut bits = open;
    while bits != 0 {
        let v = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        chosen.push(v);
        cover_search(masks, chosen_mask | 1 << v, chosen, best);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::{int, rat};

    fn k3() -> Hypergraph {
        Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn triangle_numbers() {
        let h = k3();
        assert_eq!(h.matching_number().unwrap(), 1);
        assert_eq!(h.covering_number().unwrap(), 2);
        let (nu_star, w) = h.fractional_matching().unwrap();
        assert_eq!(nu_star, rat(3, 2));
        assert_eq!(w, vec![rat(1, 2); 3]);
        assert_eq!(h.perfect_fractional_matching().unwrap(), Some(vec![rat(1, 2); 3]));
        assert_eq!(h.furedi_matching_bound(2).unwrap(), int(1));
        assert_eq!(h.rank_lower_bound_nustar(2).unwrap(), rat(3, 2));
    }

    #[test]
    fn simple_numbers() {
        let pm = Hypergraph::new(6, vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        assert_eq!(pm.matching_number().unwrap(), 3);
        assert_eq!(pm.perfect_fractional_matching().unwrap(), Some(vec![int(1); 3]));
        assert_eq!(pm.rank_lower_bound_nustar(2).unwrap(), int(3));
        let empty = Hypergraph::new(3, vec![]).unwrap();
        assert_eq!(empty.matching_number().unwrap(), 0);
        assert_eq!(empty.covering_number().unwrap(), 0);
        assert_eq!(empty.fractional_matching_number().unwrap(), int(0));
        let star = Hypergraph::new(4, vec![vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        assert_eq!(star.covering_number().unwrap(), 1);
        assert_eq!(star.minimum_cover().unwrap(), vec![0]);
        let single = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        assert_eq!(single.fractional_matching_number().unwrap(), int(1));
        assert_eq!(single.furedi_matching_bound(2).unwrap(), rat(2, 3));
        let two = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(two.fractional_matching_number().unwrap(), int(2));
    }

    #[test]
    fn path_has_no_perfect_fractional_matching() {
        let path = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(!path.has_perfect_fractional_matching().unwrap());
        assert!(path.rank_lower_bound_nustar(2).is_err());
    }

    #[test]
    fn partite_bound_and_validation() {
        // Two parts {0, 1} and {2, 3}; a 2-partite perfect matching has ν* = 2.
        let h = Hypergraph::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap().with_parts(vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(h.furedi_matching_bound(2).unwrap(), int(2));
        assert!(Hypergraph::new(4, vec![vec![0, 1]]).unwrap().with_parts(vec![vec![0, 1], vec![2, 3]]).is_err());
        assert!(k3().furedi_matching_bound(1).is_err());
    }

    #[test]
    fn caps_and_json() {
        let many = Hypergraph::new(2, vec![vec![0]; 21]).unwrap();
        assert!(matches!(many.matching_number(), Err(Error::CapExceeded { .. })));
        assert_eq!(many.clone().with_edge_cap(30).matching_number().unwrap(), 1);
        let j: HypergraphJson = serde_json::from_str(r#"{"vertices":3,"edges":[[0,1],[1,2],[0,2]]}"#).unwrap();
        assert_eq!(Hypergraph::from_json(j).unwrap(), k3());
        assert!(Hypergraph::new(2, vec![vec![2]]).is_err());
    }
}
