//! Independent oracles and fixtures shared by the integration tests. Nothing
//! here calls the library's matching, covering, LP, or hull routines.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use kkm_core::bad_edge::Labeling;
use kkm_core::cover::{CoverOracle, FnCover, PolyhedralCover};
use kkm_core::exact_math::{rat, Rat, RatPoint};
use kkm_core::polytope::{AnchorTable, FaceId, PolytopeModel};
use kkm_core::triangulation::Triangulation;
use kkm_core::SolveCertificate;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub type Q = Ratio<i64>;

// ---------------------------------------------------------------- hypergraphs

/// Largest number of pairwise disjoint edges, by trying every edge subset.
pub fn brute_nu(edges: &[Vec<usize>]) -> usize {
    let m = edges.len();
    let masks: Vec<u64> = edges.iter().map(|e| e.iter().fold(0u64, |a, &v| a | 1 << v)).collect();
    (0u32..1 << m)
        .filter(|&s| {
            let mut used = 0u64;
            (0..m).filter(|i| s >> i & 1 == 1).all(|i| {
                let ok = used & masks[i] == 0;
                used |= masks[i];
                ok
            })
        })
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Fewest vertices meeting every edge, by trying every vertex subset.
pub fn brute_tau(n: usize, edges: &[Vec<usize>]) -> usize {
    let masks: Vec<u64> = edges.iter().map(|e| e.iter().fold(0u64, |a, &v| a | 1 << v)).collect();
    (0u64..1 << n)
        .filter(|s| masks.iter().all(|m| m & s != 0))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// Solves a square system by Gauss-Jordan; `None` if singular.
fn solve_square(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= inv;
        }
        b[c] *= inv;
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c];
                for k in 0..n {
                    let v = a[c][k];
                    a[r][k] -= f * v;
                }
                let v = b[c];
                b[r] -= f * v;
            }
        }
    }
    Some(b)
}

/// Vertices of `{w >= 0 : sum_{e ∋ v} w_e <= 1}`: each is fixed by choosing a
/// support `S` of edges and `|S|` tight vertex rows.
pub fn matching_polytope_vertices(n: usize, edges: &[Vec<usize>]) -> Vec<Vec<Q>> {
    let m = edges.len();
    let inc = |v: usize, e: usize| edges[e].contains(&v);
    let mut out = vec![vec![Q::zero(); m]];
    for s in 1u32..1 << m {
        let support: Vec<usize> = (0..m).filter(|i| s >> i & 1 == 1).collect();
        let size = support.len();
        if size > n {
            continue;
        }
        for rows in subsets(n, size) {
            let a: Vec<Vec<Q>> = rows
                .iter()
                .map(|&v| support.iter().map(|&e| if inc(v, e) { Q::one() } else { Q::zero() }).collect())
                .collect();
            let Some(sol) = solve_square(a, vec![Q::one(); size]) else { continue };
            if sol.iter().any(|x| x.is_negative()) {
                continue;
            }
            let mut w = vec![Q::zero(); m];
            for (i, &e) in support.iter().enumerate() {
                w[e] = sol[i];
            }
            let feasible = (0..n).all(|v| (0..m).filter(|&e| inc(v, e)).map(|e| w[e]).sum::<Q>() <= Q::one());
            if feasible {
                out.push(w);
            }
        }
    }
    out
}

/// `ν*` and whether a perfect fractional matching exists, both read off the
/// polytope vertices (a perfect one exists iff `max sum |e| w_e = |V|`).
pub fn brute_fractional(n: usize, edges: &[Vec<usize>]) -> (Q, bool) {
    let verts = matching_polytope_vertices(n, edges);
    let nu = verts.iter().map(|w| w.iter().sum::<Q>()).max().unwrap_or_else(Q::zero);
    let load = verts
        .iter()
        .map(|w| w.iter().zip(edges).map(|(x, e)| x * Q::from(e.len() as i64)).sum::<Q>())
        .max()
        .unwrap_or_else(Q::zero);
    (nu, load == Q::from(n as i64))
}

pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == size).map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect()).collect()
}

pub fn to_q(r: &Rat) -> Q {
    use num_traits::ToPrimitive;
    Q::new(r.numer().to_i64().unwrap(), r.denom().to_i64().unwrap())
}

/// A random hypergraph with nonempty, distinct-vertex edges.
pub fn random_hypergraph(rng: &mut impl Rng, max_v: usize, max_e: usize) -> (usize, Vec<Vec<usize>>) {
    let n = rng.gen_range(1..=max_v);
    let m = rng.gen_range(0..=max_e);
    let edges = (0..m)
        .map(|_| {
            let mask: u32 = rng.gen_range(1..1 << n);
            (0..n).filter(|v| mask >> v & 1 == 1).collect()
        })
        .collect();
    (n, edges)
}

/// A random `d`-partite hypergraph on parts of size `s`, each edge meeting every
/// part once: vertex `(t, j)` is `t * s + j`.
pub fn random_partite(rng: &mut impl Rng, d: usize, s: usize, max_e: usize) -> (usize, Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let m = rng.gen_range(1..=max_e);
    let edges = (0..m)
        .map(|_| {
            let mut e = Vec::new();
            for t in 0..d {
                e.push(t * s + rng.gen_range(0..s));
            }
            e
        })
        .collect();
    let parts = (0..d).map(|t| (t * s..(t + 1) * s).collect()).collect();
    (d * s, edges, parts)
}

// ------------------------------------------------------------------ geometry

pub fn pt(c: &[(i64, i64)]) -> RatPoint {
    RatPoint::new(c.iter().map(|&(n, d)| rat(n, d)).collect())
}

/// Exact midpoint, computed coordinate by coordinate.
pub fn mid(a: &RatPoint, b: &RatPoint) -> RatPoint {
    RatPoint::new(a.coords().iter().zip(b.coords()).map(|(x, y)| (x + y) / Rat::from_integer(2.into())).collect())
}

pub fn sq_dist(a: &RatPoint, b: &RatPoint) -> Rat {
    a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Coefficients `c >= 0`, `sum c = 1`, `sum c_i g_i = p`, checked by direct arithmetic.
pub fn is_convex_combination(p: &RatPoint, gens: &[RatPoint], coeffs: &[Rat]) -> bool {
    if gens.len() != coeffs.len() || coeffs.iter().any(|c| c.is_negative()) || coeffs.iter().sum::<Rat>() != Rat::one() {
        return false;
    }
    (0..p.dim()).all(|t| gens.iter().zip(coeffs).map(|(g, c)| c * &g.coords()[t]).sum::<Rat>() == p.coords()[t])
}

/// Membership in the simplex face with vertex set `S`: on the simplex and `x_j = 0` off `S`.
pub fn simplex_face_contains(face_vertices: &[usize], x: &RatPoint) -> bool {
    x.coords().iter().enumerate().all(|(j, c)| !c.is_negative() && (face_vertices.contains(&j) || c.is_zero()))
        && x.coords().iter().sum::<Rat>() == Rat::one()
}

/// Face membership on a product of simplices with the given factors.
pub fn product_face_contains(factors: &[usize], face_vertices: &[usize], x: &RatPoint) -> bool {
    let d = factors.len();
    let tuples: Vec<Vec<usize>> = face_vertices
        .iter()
        .map(|&id| {
            let mut id = id;
            let mut t = vec![0; d];
            for s in (0..d).rev() {
                t[s] = id % factors[s];
                id /= factors[s];
            }
            t
        })
        .collect();
    let mut off = 0;
    for (s, &m) in factors.iter().enumerate() {
        let allowed: BTreeSet<usize> = tuples.iter().map(|t| t[s]).collect();
        let block = &x.coords()[off..off + m];
        if block.iter().any(|c| c.is_negative()) || block.iter().sum::<Rat>() != Rat::one() {
            return false;
        }
        if block.iter().enumerate().any(|(j, c)| !c.is_zero() && !allowed.contains(&j)) {
            return false;
        }
        off += m;
    }
    true
}

pub fn face_contains(polytope: &PolytopeModel, face: FaceId, x: &RatPoint) -> bool {
    use kkm_core::polytope::PolytopeKind;
    let vs = &polytope.face(face).vertex_ids;
    match polytope.kind() {
        PolytopeKind::Simplex { .. } => simplex_face_contains(vs, x),
        PolytopeKind::Product { factors } => product_face_contains(factors, vs, x),
        PolytopeKind::Custom => panic!("custom polytopes are not covered by the test oracle"),
    }
}

/// `λ(v) ⊆ supp(v)`: each vertex of the face only uses coordinates where `v` is positive.
pub fn label_face_within_support(polytope: &PolytopeModel, face: FaceId, v: &RatPoint) -> bool {
    use kkm_core::polytope::PolytopeKind;
    let verts = &polytope.face(face).vertex_ids;
    match polytope.kind() {
        PolytopeKind::Simplex { .. } => verts.iter().all(|&j| !v.coords()[j].is_zero()),
        PolytopeKind::Product { factors } => verts.iter().all(|&id| {
            let mut id = id;
            let mut ok = true;
            let offs: Vec<usize> = factors.iter().scan(0, |a, &m| {
                let o = *a;
                *a += m;
                Some(o)
            }).collect();
            for s in (0..factors.len()).rev() {
                let j = id % factors[s];
                id /= factors[s];
                ok &= !v.coords()[offs[s] + j].is_zero();
            }
            ok
        }),
        PolytopeKind::Custom => panic!("custom polytopes are not covered by the test oracle"),
    }
}

/// Re-checks a labeling edge by edge: (P1) by oracle query, (P2) `y(v) ∈ λ(v) ⊆ supp(v)`
/// by coordinates, and the anchor table entry; (P3) on every maximal simplex.
pub fn check_labeling(
    tri: &Triangulation,
    lab: &Labeling,
    oracle: &dyn CoverOracle,
    anchors: &AnchorTable,
) -> Result<(), String> {
    let p = tri.polytope();
    for v in 0..tri.num_vertices() {
        let x = tri.vertex(v);
        let (f, face, y) = (lab.color[v], lab.lambda[v], &lab.anchor[v]);
        if !oracle.contains(f, face, x) {
            return Err(format!("P1 fails at vertex {v}"));
        }
        if !face_contains(p, face, y) || !label_face_within_support(p, face, x) {
            return Err(format!("P2 fails at vertex {v}"));
        }
        if y != anchors.get(f, face) {
            return Err(format!("anchor mismatch at vertex {v}"));
        }
    }
    for cell in tri.cells() {
        let colors: BTreeSet<usize> = cell.iter().map(|&v| lab.color[v]).collect();
        if colors.len() != cell.len() {
            return Err(format!("P3 fails on {cell:?}"));
        }
    }
    Ok(())
}

/// Full independent check of a solve certificate.
pub fn check_certificate(
    polytope: &PolytopeModel,
    oracle: &dyn CoverOracle,
    anchors: &AnchorTable,
    cert: &SolveCertificate,
    p: &RatPoint,
) -> Result<(), String> {
    let k = polytope.dim() + 1;
    if cert.pi.len() != k || cert.faces.len() != k || cert.witness_points.len() != k {
        return Err("certificate has the wrong size".into());
    }
    if cert.pi.iter().collect::<BTreeSet<_>>().len() != k {
        return Err("pi is not injective".into());
    }
    for i in 0..k {
        if !oracle.contains(cert.pi[i], cert.faces[i], &cert.witness_points[i]) {
            return Err(format!("witness {i} is not in its set"));
        }
        if !label_face_within_support(polytope, cert.faces[i], &cert.witness_points[i]) {
            return Err(format!("face {i} escapes the support of its witness"));
        }
    }
    let ys: Vec<RatPoint> = (0..k).map(|i| anchors.get(cert.pi[i], cert.faces[i]).clone()).collect();
    if !is_convex_combination(p, &ys, &cert.coeffs) {
        return Err("hull identity fails".into());
    }
    let eps2 = &cert.eps * &cert.eps;
    for a in 0..k {
        for b in a + 1..k {
            if sq_dist(&cert.witness_points[a], &cert.witness_points[b]) > eps2 {
                return Err("witness simplex is wider than eps".into());
            }
        }
    }
    Ok(())
}

// ------------------------------------------------------------------- covers

/// Colors `0..n-k` get random unions of threshold polyhedra on random faces;
/// the last `k` colors contain all of `P` on every vertex face, so any `k - 1`
/// excluded colors still leave a label.
pub fn random_cover(rng: &mut impl Rng, polytope: &PolytopeModel, n: usize) -> PolyhedralCover {
    use kkm_core::cover::Halfspace;
    let k = polytope.dim() + 1;
    let dim = polytope.ambient_dim();
    let mut cover = PolyhedralCover::new(n);
    let faces = polytope.faces();
    for c in 0..n - k {
        for _ in 0..rng.gen_range(1..=4) {
            let f = &faces[rng.gen_range(0..faces.len())];
            let hs = (0..rng.gen_range(1..=2))
                .map(|_| {
                    let coord = rng.gen_range(0..dim);
                    Halfspace::coordinate_at_least(dim, coord, rat(rng.gen_range(0..=2 * k as i64), 4 * k as i64))
                })
                .collect();
            cover.add(c, f.id, hs).unwrap();
        }
    }
    for c in n - k..n {
        for f in faces.iter().filter(|f| f.dim == 0) {
            cover.add(c, f.id, vec![]).unwrap();
        }
    }
    cover
}

// ------------------------------------------------------------ worked example

/// The worked example on `Δ^2` with four colors (0-based): `u1 = e3`, `u2` the
/// centroid, `u4 = e2`, `u3 = e1`, vertex ids 0, 1, 2, 3 in that order.
pub struct WorkedExample {
    pub tri: Triangulation,
    pub oracle: Box<dyn CoverOracle>,
    pub anchors: AnchorTable,
    pub b12: RatPoint,
    pub b124: RatPoint,
    pub b123: RatPoint,
}

pub fn worked_example() -> WorkedExample {
    let p = Arc::new(PolytopeModel::simplex(3).unwrap());
    let u1 = RatPoint::unit(3, 2);
    let u2 = pt(&[(1, 3), (1, 3), (1, 3)]);
    let u4 = RatPoint::unit(3, 1);
    let u3 = RatPoint::unit(3, 0);
    let tri = Triangulation::from_cells(
        p.clone(),
        vec![u1.clone(), u2.clone(), u4.clone(), u3.clone()],
        vec![vec![0, 1, 3], vec![0, 1, 2], vec![1, 3, 2]],
    )
    .unwrap();
    let b12 = mid(&u1, &u2);
    let b124 = mid(&b12, &u4);
    let b123 = mid(&b12, &u3);
    // Each scripted point lies in at least three sets, so any two colors still cover it.
    let table: Vec<(RatPoint, Vec<usize>)> = vec![
        (u1, vec![0, 1, 2, 3]),
        (u2, vec![0, 1, 2, 3]),
        (u3, vec![1, 2, 3]),
        (u4, vec![1, 2, 3]),
        (b12.clone(), vec![1, 2, 3]),
        (b124.clone(), vec![0, 2, 3]),
        (b123.clone(), vec![0, 1, 3]),
    ];
    let oracle = FnCover::new(4, move |i, _, x: &RatPoint| match table.iter().find(|(q, _)| q == x) {
        Some((_, colors)) => colors.contains(&i),
        None => true,
    });
    let anchors = kkm_core::polytope::default_anchors(&p, 4);
    WorkedExample { tri, oracle: Box::new(oracle), anchors, b12, b124, b123 }
}

/// The final complex, derived by hand from the subdivision rule: vertex sets of
/// the nine triangles with `b12 = 4`, `b124 = 5`, `b123 = 6`.
pub fn worked_example_final_cells() -> BTreeSet<BTreeSet<usize>> {
    [
        [1, 3, 6],
        [1, 4, 6],
        [0, 3, 6],
        [0, 4, 6],
        [1, 2, 5],
        [1, 4, 5],
        [0, 2, 5],
        [0, 4, 5],
        [1, 2, 3],
    ]
    .iter()
    .map(|c| c.iter().copied().collect())
    .collect()
}
