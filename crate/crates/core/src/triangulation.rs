//! Convex triangulations of a polytope, the edge subdivision `X(v1, v2)`,
//! longest-edge refinement, and bad-edge bookkeeping.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_math::{determinant, midpoint, LinearProgram, LpOutcome, Rat, RatPoint, Relation};
use crate::polytope::{PolytopeKind, PolytopeModel, Support};

pub type VertexId = usize;

/// How a triangulation vertex came to exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexOrigin {
    Original,
    /// An iterated barycenter `b(g_1, ..., g_m)` of the listed vertices.
    Barycenter { generators: Vec<VertexId> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMeta {
    pub support: Support,
    pub origin: VertexOrigin,
}

/// Result of one call to [`Triangulation::subdivide_edge`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub vertex: VertexId,
    /// Number of maximal simplices that contained the edge.
    pub split_cells: usize,
}

/// A pure simplicial complex triangulating a polytope. Cells are sorted vertex-id lists.
#[derive(Clone, Debug)]
pub struct Triangulation {
    polytope: Arc<PolytopeModel>,
    verts: Vec<RatPoint>,
    meta: Vec<VertexMeta>,
    cells: Vec<Vec<VertexId>>,
    incident: Vec<Vec<usize>>,
}

/// Default cap on subdivisions performed by one refinement.
pub const REFINE_CAP: usize = 1_000_000;

impl Triangulation {
    /// The built-in triangulation of `polytope`: one cell for a simplex, the
    /// staircase triangulation for a product of simplices, and the supplied one otherwise.
    pub fn initial(polytope: Arc<PolytopeModel>) -> Result<Self> {
        match polytope.kind().clone() {
            PolytopeKind::Simplex { k } => {
                let verts = polytope.vertices().to_vec();
                Self::from_cells(polytope, verts, vec![(0..k).collect()])
            }
            PolytopeKind::Product { factors } => {
                let verts = polytope.vertices().to_vec();
                let cells = staircase_cells(&factors);
                Self::from_cells(polytope, verts, cells)
            }
            PolytopeKind::Custom => {
                let supplied = polytope.supplied_triangulation().cloned().ok_or_else(|| {
                    Error::InvalidTriangulation("custom polytope carries no triangulation".into())
                })?;
                let t = Self::from_cells(polytope, supplied.vertices, supplied.cells)?;
                if t.cells.len() <= 64 {
                    t.check_disjoint_interiors()?;
                }
                Ok(t)
            }
        }
    }

    /// Builds a triangulation from explicit data and validates purity,
    /// nondegeneracy, vertex membership, and the ridge condition.
    pub fn from_cells(polytope: Arc<PolytopeModel>, verts: Vec<RatPoint>, cells: Vec<Vec<VertexId>>) -> Result<Self> {
        let mut meta = Vec::with_capacity(verts.len());
        for v in &verts {
            let support = polytope.support(v).map_err(|e| match e {
                Error::NotInPolytope(p) => Error::InvalidTriangulation(format!("vertex {p} lies outside the polytope")),
                other => other,
            })?;
            meta.push(VertexMeta { support, origin: VertexOrigin::Original });
        }
        let mut t = Triangulation { polytope, verts, meta, cells: Vec::new(), incident: Vec::new() };
        t.incident = vec![Vec::new(); t.verts.len()];
        for mut cell in cells {
            cell.sort_unstable();
            t.push_cell(cell);
        }
        t.validate()?;
        Ok(t)
    }

    fn push_cell(&mut self, cell: Vec<VertexId>) -> usize {
        let id = self.cells.len();
        for &v in &cell {
            if v < self.incident.len() {
                self.incident[v].push(id);
            }
        }
        self.cells.push(cell);
        id
    }

    pub fn polytope(&self) -> &Arc<PolytopeModel> {
        &self.polytope
    }

    pub fn num_vertices(&self) -> usize {
        self.verts.len()
    }

    pub fn vertex(&self, v: VertexId) -> &RatPoint {
        &self.verts[v]
    }

    pub fn vertices(&self) -> &[RatPoint] {
        &self.verts
    }

    pub fn meta(&self, v: VertexId) -> &VertexMeta {
        &self.meta[v]
    }

    pub fn support(&self, v: VertexId) -> Support {
        self.meta[v].support
    }

    /// Maximal simplices in insertion order.
    pub fn cells(&self) -> &[Vec<VertexId>] {
        &self.cells
    }

    /// Vertex ids of the cell as a point list.
    pub fn cell_points(&self, cell: usize) -> Vec<RatPoint> {
        self.cells[cell].iter().map(|&v| self.verts[v].clone()).collect()
    }

    /// Indices of the maximal simplices containing `v`.
    pub fn cells_containing(&self, v: VertexId) -> &[usize] {
        self.incident.get(v).map_or(&[], Vec::as_slice)
    }

    pub fn cells_containing_edge(&self, a: VertexId, b: VertexId) -> Vec<usize> {
        if a >= self.verts.len() || b >= self.verts.len() || a == b {
            return Vec::new();
        }
        self.incident[a].iter().copied().filter(|&c| self.cells[c].binary_search(&b).is_ok()).collect()
    }

    pub fn is_edge(&self, a: VertexId, b: VertexId) -> bool {
        !self.cells_containing_edge(a, b).is_empty()
    }

    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.incident[v].iter().flat_map(|&c| self.cells[c].iter().copied()).filter(|&u| u != v).collect()
    }

    /// All edges as ordered pairs `(u, v)` with `u < v`.
    pub fn edges(&self) -> BTreeSet<(VertexId, VertexId)> {
        let mut out = BTreeSet::new();
        for cell in &self.cells {
            for (i, &a) in cell.iter().enumerate() {
                for &b in &cell[i + 1..] {
                    out.insert((a, b));
                }
            }
        }
        out
    }

    /// Edges whose endpoints share a color.
    pub fn bad_edges(&self, colors: &[usize]) -> BTreeSet<(VertexId, VertexId)> {
        self.edges().into_iter().filter(|&(a, b)| colors[a] == colors[b]).collect()
    }

    /// `B(X; v)`: the neighbors of `v` sharing its color.
    pub fn bad_neighbors(&self, v: VertexId, colors: &[usize]) -> BTreeSet<VertexId> {
        self.neighbors(v).into_iter().filter(|&u| colors[u] == colors[v]).collect()
    }

    /// Replaces every maximal simplex `{a, b, rest}` by `{m, b, rest}` and
    /// `{m, a, rest}` where `m` is the midpoint of `ab`.
    pub fn subdivide_edge(&mut self, a: VertexId, b: VertexId) -> Result<Subdivision> {
        self.subdivide_edge_tagged(a, b, vec![a, b])
    }

    /// As [`subdivide_edge`](Self::subdivide_edge), recording `generators` as the new vertex's origin.
    pub fn subdivide_edge_tagged(&mut self, a: VertexId, b: VertexId, generators: Vec<VertexId>) -> Result<Subdivision> {
        let containing = self.cells_containing_edge(a, b);
        if containing.is_empty() {
            return Err(Error::NotAnEdge(a, b));
        }
        let m = self.verts.len();
        self.verts.push(midpoint(&self.verts[a], &self.verts[b])?);
        let support = self.polytope.join(self.meta[a].support, self.meta[b].support);
        self.meta.push(VertexMeta { support, origin: VertexOrigin::Barycenter { generators } });
        self.incident.push(Vec::new());
        for &c in &containing {
            let old = std::mem::take(&mut self.cells[c]);
            let mut keep_b: Vec<VertexId> = old.iter().map(|&v| if v == a { m } else { v }).collect();
            let mut keep_a: Vec<VertexId> = old.iter().map(|&v| if v == b { m } else { v }).collect();
            keep_b.sort_unstable();
            keep_a.sort_unstable();
            self.cells[c] = keep_b;
            self.incident[a].retain(|&x| x != c);
            self.incident[m].push(c);
            let second = self.cells.len();
            for &v in &keep_a {
                if v != m {
                    self.incident[v].push(second);
                }
            }
            self.incident[m].push(second);
            self.cells.push(keep_a);
        }
        Ok(Subdivision { vertex: m, split_cells: containing.len() })
    }

    /// Copying variant of [`subdivide_edge`](Self::subdivide_edge).
    pub fn subdivided(&self, a: VertexId, b: VertexId) -> Result<(Triangulation, Subdivision)> {
        let mut t = self.clone();
        let s = t.subdivide_edge(a, b)?;
        Ok((t, s))
    }

    /// Squared length of the longest edge.
    pub fn max_edge_squared(&self) -> Rat {
        self.edges()
            .into_iter()
            .map(|(a, b)| self.edge_squared(a, b))
            .max()
            .unwrap_or_else(Rat::zero)
    }

    fn edge_squared(&self, a: VertexId, b: VertexId) -> Rat {
        self.verts[a].squared_distance(&self.verts[b]).expect("vertices share a dimension")
    }

    /// Bisects a longest edge (ties to the lexicographically smallest pair)
    /// until every edge has length at most `eps`. Returns the number of subdivisions.
    pub fn refine_to_diameter(&mut self, eps: &Rat) -> Result<usize> {
        self.refine_to_diameter_capped(eps, REFINE_CAP)
    }

    pub fn refine_to_diameter_capped(&mut self, eps: &Rat, cap: usize) -> Result<usize> {
        if !eps.is_positive() {
            return Err(Error::invalid(format!("eps must be positive, got {eps}")));
        }
        let eps2 = eps * eps;
        let mut queue: BTreeSet<(Rat, Reverse<(VertexId, VertexId)>)> =
            self.edges().into_iter().map(|(a, b)| (self.edge_squared(a, b), Reverse((a, b)))).collect();
        let mut count = 0;
        while let Some((len, Reverse((a, b)))) = queue.pop_last() {
            if len <= eps2 {
                break;
            }
            if count == cap {
                return Err(Error::IterationCap { what: "refine_to_diameter", cap });
            }
            let m = self.subdivide_edge(a, b)?.vertex;
            count += 1;
            for u in self.neighbors(m) {
                queue.insert((self.edge_squared(u, m), Reverse((u.min(m), u.max(m)))));
            }
        }
        Ok(count)
    }

    /// Copying variant of [`refine_to_diameter`](Self::refine_to_diameter).
    pub fn refined_to_diameter(&self, eps: &Rat) -> Result<Triangulation> {
        let mut t = self.clone();
        t.refine_to_diameter(eps)?;
        Ok(t)
    }

    /// Twice-scaled volume (`dim!` times the volume) of a cell in chart coordinates.
    pub fn cell_volume(&self, cell: usize) -> Rat {
        let chart = self.polytope.chart_coordinates();
        self.cell_volume_in(cell, &chart)
    }

    fn cell_volume_in(&self, cell: usize, chart: &[usize]) -> Rat {
        let ids = &self.cells[cell];
        let base = &self.verts[ids[0]];
        let rows: Vec<Vec<Rat>> = ids[1..]
            .iter()
            .map(|&v| chart.iter().map(|&c| &self.verts[v][c] - &base[c]).collect())
            .collect();
        determinant(&rows).abs()
    }

    /// Sum of [`cell_volume`](Self::cell_volume) over all cells.
    pub fn total_volume(&self) -> Rat {
        let chart = self.polytope.chart_coordinates();
        (0..self.cells.len()).map(|c| self.cell_volume_in(c, &chart)).sum()
    }

    /// Structural validation: purity, distinct vertices per cell, nondegeneracy,
    /// and that every ridge lies in two cells or on the boundary of the polytope.
    pub fn validate(&self) -> Result<()> {
        let k = self.polytope.dim() + 1;
        let chart = self.polytope.chart_coordinates();
        let mut ridges: HashMap<Vec<VertexId>, usize> = HashMap::new();
        for (c, cell) in self.cells.iter().enumerate() {
            if cell.len() != k {
                return Err(Error::InvalidTriangulation(format!("cell {cell:?} has {} vertices, expected {k}", cell.len())));
            }
            if cell.windows(2).any(|w| w[0] == w[1]) || cell.iter().any(|&v| v >= self.verts.len()) {
                return Err(Error::InvalidTriangulation(format!("cell {cell:?} has repeated or unknown vertices")));
            }
            if self.cell_volume_in(c, &chart).is_zero() {
                return Err(Error::InvalidTriangulation(format!("cell {cell:?} is degenerate")));
            }
            for skip in 0..k {
                let ridge: Vec<VertexId> =
                    cell.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                *ridges.entry(ridge).or_default() += 1;
            }
        }
        for (ridge, count) in ridges {
            let boundary = ridge
                .iter()
                .map(|&v| self.meta[v].support)
                .try_fold(None::<Support>, |acc, s| {
                    let j = match acc {
                        None => s,
                        Some(a) => self.polytope.join(a, s),
                    };
                    (j != Support::Whole).then_some(Some(j))
                })
                .is_some();
            let ok = match count {
                1 => boundary,
                2 => !boundary,
                _ => false,
            };
            if !ok {
                return Err(Error::InvalidTriangulation(format!(
                    "ridge {ridge:?} lies in {count} cells{}",
                    if boundary { " on the boundary" } else { "" }
                )));
            }
        }
        Ok(())
    }

    /// Checks by LP that no two cells share an interior point. Quadratic in the
    /// number of cells, so meant for small complexes.
    pub fn check_disjoint_interiors(&self) -> Result<()> {
        let chart = self.polytope.chart_coordinates();
        let project = |v: VertexId| -> Vec<Rat> { chart.iter().map(|&c| self.verts[v][c].clone()).collect() };
        for (i, a) in self.cells.iter().enumerate() {
            for b in &self.cells[i + 1..] {
                if interiors_meet(&a.iter().map(|&v| project(v)).collect::<Vec<_>>(), &b.iter().map(|&v| project(v)).collect::<Vec<_>>())? {
                    return Err(Error::InvalidTriangulation(format!("cells {a:?} and {b:?} overlap")));
                }
            }
        }
        Ok(())
    }

    /// Re-derives every cached support from coordinates.
    pub fn check_supports(&self) -> Result<()> {
        for (v, p) in self.verts.iter().enumerate() {
            let s = self.polytope.support(p)?;
            if s != self.meta[v].support {
                return Err(Error::InvariantViolation(format!("cached support of vertex {v} is stale")));
            }
        }
        Ok(())
    }
}

/// `true` if two full-dimensional simplices (given by vertex coordinates) have
/// a common point with all barycentric weights positive in both.
fn interiors_meet(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Result<bool> {
    let dim = a[0].len();
    let (na, nb) = (a.len(), b.len());
    // Variables: lambda (na), mu (nb), t.
    let nv = na + nb + 1;
    let one = Rat::from_integer(1.into());
    let mut obj = vec![Rat::zero(); nv];
    obj[nv - 1] = one.clone();
    let mut lp = LinearProgram::new(nv).maximize(obj);
    for i in 0..na + nb {
        let mut row = vec![Rat::zero(); nv];
        row[i] = one.clone();
        row[nv - 1] = -one.clone();
        lp.constrain(row, Relation::Ge, Rat::zero());
    }
    let mut sa = vec![Rat::zero(); nv];
    let mut sb = vec![Rat::zero(); nv];
    for i in 0..na {
        sa[i] = one.clone();
    }
    for j in 0..nb {
        sb[na + j] = one.clone();
    }
    lp.constrain(sa, Relation::Eq, one.clone());
    lp.constrain(sb, Relation::Eq, one.clone());
    for c in 0..dim {
        let mut row = vec![Rat::zero(); nv];
        for i in 0..na {
            row[i] = a[i][c].clone();
        }
        for j in 0..nb {
            row[na + j] = -b[j][c].clone();
        }
        lp.constrain(row, Relation::Eq, Rat::zero());
    }
    // t <= 1 keeps the program bounded even if the data is degenerate.
    let mut cap = vec![Rat::zero(); nv];
    cap[nv - 1] = one.clone();
    lp.constrain(cap, Relation::Le, one);
    Ok(match lp.solve()? {
        LpOutcome::Optimal { value, .. } => value.is_positive(),
        _ => false,
    })
}

/// Cells of the staircase triangulation of a product of simplices: one chain
/// per distinct ordering of the unit steps from `(0, ..., 0)` to `(m_1-1, ..., m_d-1)`.
pub fn staircase_cells(factors: &[usize]) -> Vec<Vec<VertexId>> {
    let mut remaining: Vec<usize> = factors.iter().map(|m| m - 1).collect();
    let mut tuple = vec![0; factors.len()];
    let id_of = |t: &[usize]| t.iter().zip(factors).fold(0, |acc, (&j, &m)| acc * m + j);
    let mut chain = vec![id_of(&tuple)];
    let mut out = Vec::new();
    fn walk(
        factors: &[usize],
        remaining: &mut [usize],
        tuple: &mut [usize],
        chain: &mut Vec<VertexId>,
        out: &mut Vec<Vec<VertexId>>,
        id_of: &dyn Fn(&[usize]) -> VertexId,
    ) {
        if remaining.iter().all(|&r| r == 0) {
            let mut cell = chain.clone();
            cell.sort_unstable();
            out.push(cell);
            return;
        }
        for t in 0..factors.len() {
            if remaining[t] == 0 {
                continue;
            }
            remaining[t] -= 1;
            tuple[t] += 1;
            chain.push(id_of(tuple));
            walk(factors, remaining, tuple, chain, out, id_of);
            chain.pop();
            tuple[t] -= 1;
            remaining[t] += 1;
        }
    }
    walk(factors, &mut remaining, &mut tuple, &mut chain, &mut out, &id_of);
    out
}
