//! Polytopes given by vertices and an explicit face lattice, with supports and anchor points.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_math::{in_convex_hull, int, rank, LinearProgram, LpOutcome, Rat, RatPoint, Relation};

/// Index of a nonempty proper face in the polytope's fixed face order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId(pub usize);

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.0)
    }
}

/// The minimal face containing a point: a proper face, or the polytope itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Support {
    Face(FaceId),
    Whole,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceRecord {
    pub id: FaceId,
    /// Sorted polytope vertex ids spanning the face.
    pub vertex_ids: Vec<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolytopeKind {
    /// Standard simplex `conv{e_1, ..., e_k}` in `R^k`.
    Simplex { k: usize },
    /// `Δ^{m_1-1} × ... × Δ^{m_d-1}` in `R^{m_1+...+m_d}`; vertex ids enumerate
    /// the tuples `[m_1] × ... × [m_d]` lexicographically.
    Product { factors: Vec<usize> },
    Custom,
}

/// A triangulation supplied with a custom polytope: its own vertex list plus
/// cells given as vertex-id lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuppliedTriangulation {
    pub vertices: Vec<RatPoint>,
    pub cells: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct PolytopeModel {
    kind: PolytopeKind,
    vertices: Vec<RatPoint>,
    faces: Vec<FaceRecord>,
    dim: usize,
    reference: RatPoint,
    by_vertices: HashMap<Vec<usize>, FaceId>,
    /// `subfaces[f]` lists every face contained in `f` (itself included), in face order.
    subfaces: Vec<Vec<FaceId>>,
    all_faces: Vec<FaceId>,
    supplied: Option<SuppliedTriangulation>,
}

impl PolytopeModel {
    /// The standard simplex `Δ^{k-1}` with every nonempty proper vertex subset as a face.
    pub fn simplex(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!("simplex needs k >= 2, got {k}")));
        }
        let vertices: Vec<_> = (0..k).map(|i| RatPoint::unit(k, i)).collect();
        let faces = (1u64..(1 << k) - 1)
            .map(|mask| {
                let ids: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
                let dim = ids.len() - 1;
                (ids, dim)
            })
            .collect();
        Self::assemble(PolytopeKind::Simplex { k }, vertices, faces, k - 1, None)
    }

    /// The product `(Δ^{m-1})^d`; proper faces are products of factor faces with
    /// at least one factor proper.
    pub fn simplex_product(m: usize, d: usize) -> Result<Self> {
        if m < 2 || d < 1 {
            return Err(Error::invalid(format!("simplex product needs m >= 2 and d >= 1, got m={m}, d={d}")));
        }
        Self::product_of_simplices(&vec![m; d])
    }

    /// `Δ^{m_1 - 1} × ... × Δ^{m_d - 1}` for factor vertex counts `factors`.
    pub fn product_of_simplices(factors: &[usize]) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|&m| m < 2 || m > 16) {
            return Err(Error::invalid(format!("invalid simplex factors {factors:?}")));
        }
        let num_vertices = factors
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m))
            .filter(|&n| n <= 1 << 16)
            .ok_or_else(|| Error::invalid(format!("simplex product {factors:?} is too large")))?;
        let ambient: usize = factors.iter().sum();
        let offsets = factor_offsets(factors);
        let vertices: Vec<_> = (0..num_vertices)
            .map(|id| {
                let mut coords = vec![Rat::zero(); ambient];
                for (t, j) in product_tuple(factors, id).into_iter().enumerate() {
                    coords[offsets[t] + j] = Rat::one();
                }
                RatPoint::new(coords)
            })
            .collect();
        // Each factor face is a nonempty subset of its factor; enumerate all tuples of them.
        let choices: Vec<usize> = factors.iter().map(|&m| (1usize << m) - 1).collect();
        let total: usize = choices.iter().product();
        let mut faces = Vec::new();
        for code in 0..total {
            let mut rest = code;
            let mut masks = Vec::with_capacity(factors.len());
            for &c in &choices {
                masks.push(rest % c + 1);
                rest /= c;
            }
            if masks.iter().zip(&choices).all(|(&mk, &c)| mk == c) {
                continue;
            }
            let dim: usize = masks.iter().map(|mk| mk.count_ones() as usize - 1).sum();
            let ids: Vec<usize> = (0..num_vertices)
                .filter(|&id| product_tuple(factors, id).iter().zip(&masks).all(|(&j, &mk)| mk >> j & 1 == 1))
                .collect();
            faces.push((ids, dim));
        }
        let dim = factors.iter().map(|m| m - 1).sum();
        Self::assemble(PolytopeKind::Product { factors: factors.to_vec() }, vertices, faces, dim, None)
    }

    /// A polytope given by explicit data. Faces must be exposed faces of
    /// `conv(vertices)`, closed under intersection, with every vertex listed as a
    /// face. A triangulation must be supplied for the solver to run on it.
    pub fn custom(
        vertices: Vec<RatPoint>,
        faces: Vec<Vec<usize>>,
        reference: Option<RatPoint>,
        triangulation: Option<SuppliedTriangulation>,
    ) -> Result<Self> {
        let first = vertices.first().ok_or(Error::EmptyInput("polytope vertices"))?;
        let ambient = first.dim();
        for v in &vertices {
            first.check_dim(v)?;
        }
        let dim = affine_rank(&vertices);
        if dim == 0 {
            return Err(Error::invalid("polytope must have positive dimension"));
        }
        let mut normalized = Vec::with_capacity(faces.len());
        for mut ids in faces {
            ids.sort_unstable();
            ids.dedup();
            if ids.is_empty() {
                return Err(Error::invalid("empty face"));
            }
            if let Some(&bad) = ids.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::invalid(format!("face references unknown vertex {bad}")));
            }
            if ids.len() == vertices.len() {
                return Err(Error::invalid("the polytope itself is not a proper face"));
            }
            let pts: Vec<_> = ids.iter().map(|&i| vertices[i].clone()).collect();
            let fdim = affine_rank(&pts);
            if fdim >= dim {
                return Err(Error::invalid(format!("face {ids:?} is not proper")));
            }
            if !is_exposed_face(&vertices, &ids)? {
                return Err(Error::invalid(format!("{ids:?} is not the vertex set of a face")));
            }
            normalized.push((ids, fdim));
        }
        for i in 0..vertices.len() {
            if !normalized.iter().any(|(ids, _)| ids == &[i]) {
                return Err(Error::invalid(format!("vertex {i} is missing from the face list")));
            }
        }
        if let Some(t) = &triangulation {
            for v in &t.vertices {
                if v.dim() != ambient {
                    return Err(Error::DimensionMismatch { expected: ambient, found: v.dim() });
                }
            }
        }
        let mut model = Self::assemble(PolytopeKind::Custom, vertices, normalized, dim, triangulation)?;
        for a in 0..model.faces.len() {
            for b in a + 1..model.faces.len() {
                let meet: Vec<usize> = model.faces[a]
                    .vertex_ids
                    .iter()
                    .copied()
                    .filter(|v| model.faces[b].vertex_ids.binary_search(v).is_ok())
                    .collect();
                if !meet.is_empty() && !model.by_vertices.contains_key(&meet) {
                    return Err(Error::invalid(format!(
                        "faces {:?} and {:?} meet in {meet:?}, which is not a face",
                        model.faces[a].vertex_ids, model.faces[b].vertex_ids
                    )));
                }
            }
        }
        if let Some(p) = reference {
            model = model.with_reference_point(p)?;
        }
        Ok(model)
    }

    fn assemble(
        kind: PolytopeKind,
        vertices: Vec<RatPoint>,
        mut faces: Vec<(Vec<usize>, usize)>,
        dim: usize,
        supplied: Option<SuppliedTriangulation>,
    ) -> Result<Self> {
        faces.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        faces.dedup();
        let faces: Vec<FaceRecord> = faces
            .into_iter()
            .enumerate()
            .map(|(i, (vertex_ids, dim))| FaceRecord { id: FaceId(i), vertex_ids, dim })
            .collect();
        let by_vertices = faces.iter().map(|f| (f.vertex_ids.clone(), f.id)).collect();
        let subfaces = faces
            .iter()
            .map(|outer| {
                faces
                    .iter()
                    .filter(|inner| is_subset(&inner.vertex_ids, &outer.vertex_ids))
                    .map(|inner| inner.id)
                    .collect()
            })
            .collect();
        let all_faces = faces.iter().map(|f| f.id).collect();
        let reference = RatPoint::centroid(&vertices)?;
        Ok(PolytopeModel { kind, vertices, faces, dim, reference, by_vertices, subfaces, all_faces, supplied })
    }

    /// Replaces the reference point, which must lie in the polytope.
    pub fn with_reference_point(mut self, p: RatPoint) -> Result<Self> {
        if !self.contains(&p)? {
            return Err(Error::NotInPolytope(p));
        }
        self.reference = p;
        Ok(self)
    }

    pub fn kind(&self) -> &PolytopeKind {
        &self.kind
    }

    /// Dimension of the polytope (`k - 1` in the solver's terms).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[RatPoint] {
        &self.vertices
    }

    pub fn faces(&self) -> &[FaceRecord] {
        &self.faces
    }

    pub fn face(&self, id: FaceId) -> &FaceRecord {
        &self.faces[id.0]
    }

    pub fn reference_point(&self) -> &RatPoint {
        &self.reference
    }

    pub fn supplied_triangulation(&self) -> Option<&SuppliedTriangulation> {
        self.supplied.as_ref()
    }

    pub fn face_by_vertices(&self, ids: &[usize]) -> Option<FaceId> {
        self.by_vertices.get(ids).copied()
    }

    pub fn face_points(&self, id: FaceId) -> Vec<RatPoint> {
        self.face(id).vertex_ids.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    pub fn barycenter(&self, id: FaceId) -> RatPoint {
        RatPoint::centroid(&self.face_points(id)).expect("faces are nonempty")
    }

    /// Faces contained in `support`, in face order.
    pub fn faces_within(&self, support: Support) -> &[FaceId] {
        match support {
            Support::Face(f) => &self.subfaces[f.0],
            Support::Whole => &self.all_faces,
        }
    }

    pub fn is_subface(&self, tau: FaceId, sigma: Support) -> bool {
        match sigma {
            Support::Whole => true,
            Support::Face(s) => is_subset(&self.face(tau).vertex_ids, &self.face(s).vertex_ids),
        }
    }

    pub fn support_vertices(&self, s: Support) -> Vec<usize> {
        match s {
            Support::Face(f) => self.face(f).vertex_ids.clone(),
            Support::Whole => (0..self.vertices.len()).collect(),
        }
    }

    /// For a product polytope, the tuple `(j_1, ..., j_d)` of a vertex face.
    pub fn vertex_tuple(&self, face: FaceId) -> Option<Vec<usize>> {
        let rec = self.face(face);
        match (&self.kind, rec.vertex_ids.as_slice()) {
            (PolytopeKind::Product { factors }, &[v]) => Some(product_tuple(factors, v)),
            _ => None,
        }
    }

    /// Vertex face `v_T` of a product polytope.
    pub fn tuple_face(&self, tuple: &[usize]) -> Option<FaceId> {
        let PolytopeKind::Product { factors } = &self.kind else {
            return None;
        };
        if tuple.len() != factors.len() || tuple.iter().zip(factors).any(|(&j, &m)| j >= m) {
            return None;
        }
        let id = tuple.iter().zip(factors).fold(0, |acc, (&j, &m)| acc * m + j);
        self.face_by_vertices(&[id])
    }

    pub fn contains(&self, x: &RatPoint) -> Result<bool> {
        if x.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: x.dim() });
        }
        Ok(match &self.kind {
            PolytopeKind::Simplex { .. } => on_standard_simplex(x.coords()),
            PolytopeKind::Product { factors } => {
                let offsets = factor_offsets(factors);
                factors.iter().zip(&offsets).all(|(&m, &o)| on_standard_simplex(&x.coords()[o..o + m]))
            }
            PolytopeKind::Custom => in_convex_hull(x, &self.vertices)?.is_some(),
        })
    }

    /// `true` if `x` lies in the face `id`.
    pub fn face_contains(&self, id: FaceId, x: &RatPoint) -> Result<bool> {
        Ok(in_convex_hull(x, &self.face_points(id))?.is_some())
    }

    /// The minimal face of the polytope containing `x`.
    pub fn support(&self, x: &RatPoint) -> Result<Support> {
        if !self.contains(x)? {
            return Err(Error::NotInPolytope(x.clone()));
        }
        let lookup = |ids: Vec<usize>| -> Support {
            if ids.len() == self.vertices.len() {
                Support::Whole
            } else {
                Support::Face(self.by_vertices[&ids])
            }
        };
        match &self.kind {
            PolytopeKind::Simplex { .. } => {
                Ok(lookup((0..x.dim()).filter(|&i| x[i].is_positive()).collect()))
            }
            PolytopeKind::Product { factors } => {
                let offsets = factor_offsets(factors);
                let ids = (0..self.vertices.len())
                    .filter(|&id| {
                        product_tuple(factors, id).iter().zip(&offsets).all(|(&j, &o)| x[o + j].is_positive())
                    })
                    .collect();
                Ok(lookup(ids))
            }
            PolytopeKind::Custom => {
                for f in &self.faces {
                    if self.face_contains(f.id, x)? {
                        return Ok(Support::Face(f.id));
                    }
                }
                Ok(Support::Whole)
            }
        }
    }

    /// Smallest face containing both arguments. This is the support of any point
    /// in the open segment between points supported on `a` and `b`.
    pub fn join(&self, a: Support, b: Support) -> Support {
        let (Support::Face(fa), Support::Face(fb)) = (a, b) else {
            return Support::Whole;
        };
        let mut union = self.face(fa).vertex_ids.clone();
        union.extend_from_slice(&self.face(fb).vertex_ids);
        union.sort_unstable();
        union.dedup();
        self.faces
            .iter()
            .find(|f| is_subset(&union, &f.vertex_ids))
            .map_or(Support::Whole, |f| Support::Face(f.id))
    }

    /// Largest squared distance between two vertices.
    pub fn diameter_squared(&self) -> Rat {
        let mut best = Rat::zero();
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                let d = a.squared_distance(b).expect("vertices share a dimension");
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    /// Coordinates onto which projection is injective on the affine hull.
    pub fn chart_coordinates(&self) -> Vec<usize> {
        let base = &self.vertices[0];
        let rows: Vec<Vec<Rat>> =
            self.vertices[1..].iter().map(|v| v.sub(base).expect("same dim").into_coords()).collect();
        crate::exact_math::pivot_columns(&rows)
    }
}

/// Tuple `(j_1, ..., j_d)` of a product vertex id.
pub fn product_tuple(factors: &[usize], mut id: usize) -> Vec<usize> {
    let mut tuple = vec![0; factors.len()];
    for t in (0..factors.len()).rev() {
        tuple[t] = id % factors[t];
        id /= factors[t];
    }
    tuple
}

/// Index of the first coordinate of each factor.
pub fn factor_offsets(factors: &[usize]) -> Vec<usize> {
    factors
        .iter()
        .scan(0, |acc, &m| {
            let o = *acc;
            *acc += m;
            Some(o)
        })
        .collect()
}

fn on_standard_simplex(coords: &[Rat]) -> bool {
    coords.iter().all(|c| !c.is_negative()) && coords.iter().sum::<Rat>() == Rat::one()
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}

fn affine_rank(points: &[RatPoint]) -> usize {
    let base = &points[0];
    let rows: Vec<Vec<Rat>> = points[1..].iter().map(|v| v.sub(base).expect("same dim").into_coords()).collect();
    if rows.is_empty() {
        0
    } else {
        rank(&rows)
    }
}

/// Decides whether some affine functional is maximized on `conv(vertices)`
/// exactly at the vertices `ids`: `c·v = s` on the face and `c·v <= s - 1` off it.
fn is_exposed_face(vertices: &[RatPoint], ids: &[usize]) -> Result<bool> {
    let dim = vertices[0].dim();
    // Free variables c and s are split into positive and negative parts.
    let num_vars = 2 * dim + 2;
    let mut lp = LinearProgram::new(num_vars);
    for (i, v) in vertices.iter().enumerate() {
        let mut row = Vec::with_capacity(num_vars);
        row.extend(v.coords().iter().cloned());
        row.extend(v.coords().iter().map(|c| -c));
        row.push(-Rat::one());
        row.push(Rat::one());
        if ids.binary_search(&i).is_ok() {
            lp.constrain(row, Relation::Eq, Rat::zero());
        } else {
            lp.constrain(row, Relation::Le, int(-1));
        }
    }
    Ok(matches!(lp.solve()?, LpOutcome::Optimal { .. }))
}

/// Anchor points `y[i][τ]`, one per color and proper face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorTable {
    points: Vec<Vec<RatPoint>>,
}

impl AnchorTable {
    /// Every anchor at the barycenter of its face.
    pub fn barycentric(polytope: &PolytopeModel, colors: usize) -> Self {
        let row: Vec<RatPoint> = polytope.faces.iter().map(|f| polytope.barycenter(f.id)).collect();
        AnchorTable { points: vec![row; colors] }
    }

    /// Overrides one anchor, checking it lies in its face.
    pub fn set(&mut self, polytope: &PolytopeModel, color: usize, face: FaceId, point: RatPoint) -> Result<()> {
        if color >= self.points.len() || face.0 >= polytope.faces.len() {
            return Err(Error::invalid(format!("no anchor slot for color {color}, face {face}")));
        }
        if !polytope.face_contains(face, &point)? {
            return Err(Error::invalid(format!("anchor {point} is not in face {:?}", polytope.face(face).vertex_ids)));
        }
        self.points[color][face.0] = point;
        Ok(())
    }

    pub fn get(&self, color: usize, face: FaceId) -> &RatPoint {
        &self.points[color][face.0]
    }

    pub fn colors(&self) -> usize {
        self.points.len()
    }

    /// Re-checks that every anchor lies in its face.
    pub fn validate(&self, polytope: &PolytopeModel) -> Result<()> {
        for (color, row) in self.points.iter().enumerate() {
            if row.len() != polytope.faces.len() {
                return Err(Error::DimensionMismatch { expected: polytope.faces.len(), found: row.len() });
            }
            for (f, y) in row.iter().enumerate() {
                if !polytope.face_contains(FaceId(f), y)? {
                    return Err(Error::InvariantViolation(format!("anchor of color {color} escapes face {f}")));
                }
            }
        }
        Ok(())
    }
}

/// Barycentric anchors for `colors` colors.
pub fn default_anchors(polytope: &PolytopeModel, colors: usize) -> AnchorTable {
    AnchorTable::barycentric(polytope, colors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::rat;

    fn pt(c: &[(i64, i64)]) -> RatPoint {
        RatPoint::new(c.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn simplex_face_counts() {
        let seg = PolytopeModel::simplex(2).unwrap();
        assert_eq!(seg.faces().len(), 2);
        assert_eq!(seg.reference_point(), &pt(&[(1, 2), (1, 2)]));
        assert_eq!(PolytopeModel::simplex(3).unwrap().faces().len(), 6);
        assert_eq!(PolytopeModel::simplex(4).unwrap().faces().len(), 14);
        assert!(PolytopeModel::simplex(1).is_err());
    }

    #[test]
    fn face_order_is_dimension_then_lex() {
        let tri = PolytopeModel::simplex(3).unwrap();
        let sets: Vec<_> = tri.faces().iter().map(|f| f.vertex_ids.clone()).collect();
        assert_eq!(sets, vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn product_shapes() {
        let seg = PolytopeModel::simplex_product(2, 1).unwrap();
        let sets: Vec<_> = seg.faces().iter().map(|f| f.vertex_ids.clone()).collect();
        assert_eq!(sets, vec![vec![0], vec![1]]);
        let square = PolytopeModel::simplex_product(2, 2).unwrap();
        assert_eq!(square.vertices().len(), 4);
        assert_eq!(square.faces().len(), 8);
        assert_eq!(square.faces().iter().filter(|f| f.dim == 1).count(), 4);
        let p = PolytopeModel::simplex_product(3, 2).unwrap();
        assert_eq!(p.vertices().len(), 9);
        assert_eq!(p.dim(), 4);
        assert_eq!(p.faces().len(), 7 * 7 - 1);
        assert_eq!(p.reference_point(), &pt(&[(1, 3); 6]));
        assert!(PolytopeModel::simplex_product(1, 2).is_err());
        assert!(PolytopeModel::simplex_product(2, 0).is_err());
    }

    #[test]
    fn tuple_faces_round_trip() {
        let p = PolytopeModel::simplex_product(3, 2).unwrap();
        let f = p.tuple_face(&[2, 1]).unwrap();
        assert_eq!(p.vertex_tuple(f), Some(vec![2, 1]));
        assert_eq!(p.vertices()[p.face(f).vertex_ids[0]], RatPoint::from_ints(&[0, 0, 1, 0, 1, 0]));
    }

    #[test]
    fn support_examples() {
        let tri = PolytopeModel::simplex(3).unwrap();
        let s = tri.support(&RatPoint::unit(3, 0)).unwrap();
        assert_eq!(s, Support::Face(tri.face_by_vertices(&[0]).unwrap()));
        let s = tri.support(&pt(&[(1, 2), (1, 2), (0, 1)])).unwrap();
        assert_eq!(s, Support::Face(tri.face_by_vertices(&[0, 1]).unwrap()));
        assert_eq!(tri.support(&pt(&[(1, 3), (1, 3), (1, 3)])).unwrap(), Support::Whole);
        assert!(matches!(tri.support(&pt(&[(1, 1), (1, 1), (0, 1)])), Err(Error::NotInPolytope(_))));
    }

    #[test]
    fn join_of_supports() {
        let tri = PolytopeModel::simplex(3).unwrap();
        let a = Support::Face(tri.face_by_vertices(&[0]).unwrap());
        let b = Support::Face(tri.face_by_vertices(&[1]).unwrap());
        assert_eq!(tri.join(a, b), Support::Face(tri.face_by_vertices(&[0, 1]).unwrap()));
        let c = Support::Face(tri.face_by_vertices(&[1, 2]).unwrap());
        assert_eq!(tri.join(a, c), Support::Whole);

        let sq = PolytopeModel::simplex_product(2, 2).unwrap();
        // Diagonal vertices (0,0) and (1,1) only share the whole square.
        let v00 = Support::Face(sq.tuple_face(&[0, 0]).unwrap());
        let v11 = Support::Face(sq.tuple_face(&[1, 1]).unwrap());
        let v01 = Support::Face(sq.tuple_face(&[0, 1]).unwrap());
        assert_eq!(sq.join(v00, v11), Support::Whole);
        assert_eq!(sq.join(v00, v01), Support::Face(sq.face_by_vertices(&[0, 1]).unwrap()));
    }

    #[test]
    fn default_anchor_examples() {
        let seg = PolytopeModel::simplex(2).unwrap();
        let a = default_anchors(&seg, 3);
        for i in 0..3 {
            assert_eq!(a.get(i, FaceId(0)), &RatPoint::unit(2, 0));
        }
        let tri = PolytopeModel::simplex(3).unwrap();
        let a = default_anchors(&tri, 1);
        assert_eq!(a.get(0, tri.face_by_vertices(&[0, 1]).unwrap()), &pt(&[(1, 2), (1, 2), (0, 1)]));
        let sq = PolytopeModel::simplex_product(2, 2).unwrap();
        let a = default_anchors(&sq, 1);
        let edge = sq.face_by_vertices(&[0, 1]).unwrap();
        let mid = crate::exact_math::midpoint(&sq.vertices()[0], &sq.vertices()[1]).unwrap();
        assert_eq!(a.get(0, edge), &mid);
        a.validate(&sq).unwrap();
    }

    #[test]
    fn anchors_reject_points_outside_face() {
        let tri = PolytopeModel::simplex(3).unwrap();
        let mut a = default_anchors(&tri, 2);
        let edge = tri.face_by_vertices(&[0, 1]).unwrap();
        assert!(a.set(&tri, 1, edge, RatPoint::unit(3, 2)).is_err());
        a.set(&tri, 1, edge, RatPoint::unit(3, 1)).unwrap();
        assert_eq!(a.get(1, edge), &RatPoint::unit(3, 1));
    }

    fn unit_square() -> (Vec<RatPoint>, Vec<Vec<usize>>) {
        let v = vec![
            RatPoint::from_ints(&[0, 0]),
            RatPoint::from_ints(&[1, 0]),
            RatPoint::from_ints(&[1, 1]),
            RatPoint::from_ints(&[0, 1]),
        ];
        let f = vec![vec![0], vec![1], vec![2], vec![3], vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]];
        (v, f)
    }

    #[test]
    fn custom_square_supports() {
        let (v, f) = unit_square();
        let sq = PolytopeModel::custom(v, f, None, None).unwrap();
        assert_eq!(sq.dim(), 2);
        assert_eq!(sq.reference_point(), &pt(&[(1, 2), (1, 2)]));
        let s = sq.support(&pt(&[(1, 2), (0, 1)])).unwrap();
        assert_eq!(s, Support::Face(sq.face_by_vertices(&[0, 1]).unwrap()));
        assert_eq!(sq.support(&pt(&[(1, 4), (3, 4)])).unwrap(), Support::Whole);
    }

    #[test]
    fn custom_rejects_non_faces() {
        let (v, mut f) = unit_square();
        f.push(vec![0, 2]); // a diagonal
        assert!(PolytopeModel::custom(v.clone(), f, None, None).is_err());
        let (_, mut f) = unit_square();
        f.retain(|x| x != &vec![3]);
        assert!(PolytopeModel::custom(v.clone(), f, None, None).is_err());
        let (_, f) = unit_square();
        assert!(PolytopeModel::custom(v, f, Some(RatPoint::from_ints(&[2, 2])), None).is_err());
    }
}
