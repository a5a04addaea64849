//! Label selection and the queue-driven elimination of bad edges, producing
//! a refinement on which every maximal simplex is properly colored.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cover::{CoverOracle, ViolationCertificate};
use crate::error::{Error, Result};
use crate::exact_math::RatPoint;
use crate::polytope::{AnchorTable, FaceId, PolytopeModel, Support};
use crate::triangulation::{Triangulation, VertexId};
use crate::wire::{point_to_json, JsonRat};

/// The maps `λ`, `f`, `y` on triangulation vertices, indexed by vertex id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Labeling {
    pub lambda: Vec<FaceId>,
    pub color: Vec<usize>,
    pub anchor: Vec<RatPoint>,
}

impl Labeling {
    pub fn len(&self) -> usize {
        self.color.len()
    }

    pub fn is_empty(&self) -> bool {
        self.color.is_empty()
    }

    fn push(&mut self, face: FaceId, color: usize, anchor: RatPoint) {
        self.lambda.push(face);
        self.color.push(color);
        self.anchor.push(anchor);
    }

    /// Checks membership `v ∈ A^{f(v)}_{λ(v)}` by one oracle query per vertex,
    /// `y(v) ∈ λ(v) ⊆ supp(v)` exactly, and `y(v) = y^{f(v)}_{λ(v)}`.
    pub fn verify(&self, tri: &Triangulation, oracle: &dyn CoverOracle, anchors: &AnchorTable) -> Result<()> {
        let polytope = tri.polytope();
        if self.len() != tri.num_vertices() {
            return Err(Error::DimensionMismatch { expected: tri.num_vertices(), found: self.len() });
        }
        for v in 0..tri.num_vertices() {
            let (face, color) = (self.lambda[v], self.color[v]);
            if !oracle.contains(color, face, tri.vertex(v)) {
                return Err(Error::InvariantViolation(format!("vertex {v} is not in the set of its label")));
            }
            if polytope.support(tri.vertex(v))? != tri.support(v) || !polytope.is_subface(face, tri.support(v)) {
                return Err(Error::InvariantViolation(format!("label face of vertex {v} escapes its support")));
            }
            if &self.anchor[v] != anchors.get(color, face) || !polytope.face_contains(face, &self.anchor[v])? {
                return Err(Error::InvariantViolation(format!("anchor of vertex {v} is not in its label face")));
            }
        }
        Ok(())
    }

    /// `true` if every maximal simplex carries pairwise distinct colors.
    pub fn is_good(&self, tri: &Triangulation) -> bool {
        tri.cells().iter().all(|cell| {
            let colors: BTreeSet<usize> = cell.iter().map(|&v| self.color[v]).collect();
            colors.len() == cell.len()
        })
    }
}

/// Smallest allowed color `i`, then smallest face `τ ⊆ supp(v)`, with `v ∈ A^i_τ`.
pub fn choose_label(
    polytope: &PolytopeModel,
    oracle: &dyn CoverOracle,
    v: &RatPoint,
    allowed: &[usize],
) -> Result<(usize, FaceId)> {
    let support = polytope.support(v)?;
    choose_label_in(polytope, oracle, v, support, allowed)
}

fn choose_label_in(
    polytope: &PolytopeModel,
    oracle: &dyn CoverOracle,
    v: &RatPoint,
    support: Support,
    allowed: &[usize],
) -> Result<(usize, FaceId)> {
    let mut sorted = allowed.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let faces = polytope.faces_within(support);
    for &i in &sorted {
        if let Some(&tau) = faces.iter().find(|&&tau| oracle.contains(i, tau, v)) {
            return Ok((i, tau));
        }
    }
    let n = oracle.colors();
    let k = polytope.dim() + 1;
    if n < k {
        return Err(Error::invalid(format!("{n} colors is fewer than k = {k}")));
    }
    let need = n - k + 1;
    if sorted.len() < need {
        return Err(Error::invalid(format!("{} allowed colors, need at least {need}", sorted.len())));
    }
    Err(Error::CoverViolation(Box::new(ViolationCertificate {
        point: v.clone(),
        subset: sorted[..need].to_vec(),
        support,
    })))
}

/// Labels every vertex of `tri` with [`choose_label`] over all colors.
pub fn initial_labeling(tri: &Triangulation, oracle: &dyn CoverOracle, anchors: &AnchorTable) -> Result<Labeling> {
    let all: Vec<usize> = (0..oracle.colors()).collect();
    let mut lab = Labeling::default();
    for v in 0..tri.num_vertices() {
        let (i, tau) = choose_label_in(tri.polytope(), oracle, tri.vertex(v), tri.support(v), &all)?;
        lab.push(tau, i, anchors.get(i, tau).clone());
    }
    Ok(lab)
}

#[derive(Clone, Debug)]
pub struct EliminationOptions {
    /// Check the structural invariants of the algorithm after every step.
    pub check_claims: bool,
    pub collect_trace: bool,
    pub iteration_cap: usize,
}

impl Default for EliminationOptions {
    fn default() -> Self {
        EliminationOptions { check_claims: cfg!(debug_assertions), collect_trace: false, iteration_cap: 1_000_000 }
    }
}

/// One subdivision performed by the elimination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    /// 0 for the setup, then the iteration count.
    pub iteration: usize,
    /// Queue index `j` used in the step; absent for the setup.
    pub j: Option<usize>,
    /// The vertex removed from `Q_j`.
    pub chosen: Option<VertexId>,
    pub subdivided: (VertexId, VertexId),
    pub vertex: VertexId,
    pub coords: Vec<JsonRat>,
    pub color: usize,
    pub face: Vec<usize>,
}

impl TraceRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace records serialize")
    }
}

#[derive(Clone, Debug, Default)]
pub struct EliminationReport {
    pub iterations: usize,
    pub created: Vec<VertexId>,
    pub trace: Vec<TraceRecord>,
}

struct Run<'a> {
    tri: &'a mut Triangulation,
    lab: &'a mut Labeling,
    oracle: &'a dyn CoverOracle,
    anchors: &'a AnchorTable,
    opts: &'a EliminationOptions,
    /// Current bad edges, maintained through every subdivision.
    bad: &'a mut BTreeSet<(VertexId, VertexId)>,
    /// Bad edges not present at the start.
    fresh: BTreeSet<(VertexId, VertexId)>,
    report: EliminationReport,
}

fn edge(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

impl Run<'_> {
    /// Subdivides `ab`, labels the midpoint avoiding `excluded`, and updates the bad-edge sets.
    fn split(&mut self, a: VertexId, b: VertexId, generators: Vec<VertexId>, excluded: &[usize]) -> Result<VertexId> {
        let m = self.tri.subdivide_edge_tagged(a, b, generators)?.vertex;
        let allowed: Vec<usize> = (0..self.oracle.colors()).filter(|i| !excluded.contains(i)).collect();
        let (i, tau) = choose_label_in(self.tri.polytope(), self.oracle, self.tri.vertex(m), self.tri.support(m), &allowed)?;
        self.lab.push(tau, i, self.anchors.get(i, tau).clone());
        self.bad.remove(&edge(a, b));
        self.fresh.remove(&edge(a, b));
        for u in self.tri.bad_neighbors(m, &self.lab.color) {
            self.bad.insert(edge(u, m));
            self.fresh.insert(edge(u, m));
        }
        self.report.created.push(m);
        Ok(m)
    }

    fn record(&mut self, j: Option<usize>, chosen: Option<VertexId>, subdivided: (VertexId, VertexId), m: VertexId) {
        if !self.opts.collect_trace {
            return;
        }
        let face = self.tri.polytope().face(self.lab.lambda[m]).vertex_ids.clone();
        self.report.trace.push(TraceRecord {
            iteration: self.report.iterations,
            j,
            chosen,
            subdivided,
            vertex: m,
            coords: point_to_json(self.tri.vertex(m)),
            color: self.lab.color[m],
            face,
        });
    }
}

/// Eliminates the bad edge `(v1, v2)`: the returned refinement has no edge
/// `v1v2`, no bad edge that was not bad before, and extends the labeling.
pub fn eliminate_bad_edge(
    tri: &mut Triangulation,
    lab: &mut Labeling,
    e: (VertexId, VertexId),
    oracle: &dyn CoverOracle,
    anchors: &AnchorTable,
    opts: &EliminationOptions,
) -> Result<EliminationReport> {
    let mut bad = tri.bad_edges(&lab.color);
    eliminate_tracked(tri, lab, e, oracle, anchors, opts, &mut bad)
}

fn eliminate_tracked(
    tri: &mut Triangulation,
    lab: &mut Labeling,
    (v1, v2): (VertexId, VertexId),
    oracle: &dyn CoverOracle,
    anchors: &AnchorTable,
    opts: &EliminationOptions,
    bad: &mut BTreeSet<(VertexId, VertexId)>,
) -> Result<EliminationReport> {
    if lab.len() != tri.num_vertices() {
        return Err(Error::DimensionMismatch { expected: tri.num_vertices(), found: lab.len() });
    }
    if !tri.is_edge(v1, v2) {
        return Err(Error::NotAnEdge(v1, v2));
    }
    if lab.color[v1] != lab.color[v2] {
        return Err(Error::invalid(format!("edge ({v1}, {v2}) is not bad")));
    }
    let k = tri.polytope().dim() + 1;
    let mut run = Run { tri, lab, oracle, anchors, opts, bad, fresh: BTreeSet::new(), report: EliminationReport::default() };

    // vs[i] = v_i (1-based); bary[J] = b(v_1, ..., v_J) for J >= 2.
    let mut vs: Vec<VertexId> = vec![usize::MAX, v1, v2];
    let mut bary: Vec<VertexId> = vec![usize::MAX; 3];
    let c2 = run.lab.color[v2];
    let m = run.split(v1, v2, vec![v1, v2], &[c2])?;
    bary[2] = m;
    run.record(None, None, (v1, v2), m);
    // queues[j] holds Q_j, the bad neighbors of b(v_1, ..., v_{j+1}).
    let mut queues: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); 2];
    queues[1] = run.tri.bad_neighbors(m, &run.lab.color);
    if opts.check_claims {
        check_invariants(&run, &vs, &bary, &queues, 2, k)?;
    }

    while let Some(j) = (1..queues.len()).rev().find(|&j| !queues[j].is_empty()) {
        run.report.iterations += 1;
        if run.report.iterations > opts.iteration_cap {
            return Err(Error::IterationCap { what: "eliminate_bad_edge", cap: opts.iteration_cap });
        }
        let v = *queues[j].iter().next().expect("nonempty queue");
        queues[j].remove(&v);
        if vs.len() <= j + 2 {
            vs.resize(j + 3, usize::MAX);
            bary.resize(j + 3, usize::MAX);
        }
        vs[j + 2] = v;
        let excluded: Vec<usize> = vs[2..=j + 2].iter().map(|&u| run.lab.color[u]).collect();
        let generators = vs[1..=j + 2].to_vec();
        let base = bary[j + 1];
        let m = run.split(base, v, generators, &excluded)?;
        bary[j + 2] = m;
        run.record(Some(j), Some(v), (base, v), m);
        if queues.len() <= j + 1 {
            queues.resize(j + 2, BTreeSet::new());
        }
        queues[j + 1] = run.tri.bad_neighbors(m, &run.lab.color);
        if opts.check_claims {
            check_invariants(&run, &vs, &bary, &queues, j + 2, k)?;
        }
    }

    if opts.check_claims {
        // Only edges at new vertices appear and only v1v2 disappears, so a local
        // recount decides B(T') ⊆ B(T) \ {v1v2}.
        if run.report.created.iter().any(|&m| !run.tri.bad_neighbors(m, &run.lab.color).is_empty()) {
            return Err(Error::InvariantViolation(format!("elimination of ({v1}, {v2}) left new bad edges")));
        }
        if run.tri.is_edge(v1, v2) || run.bad.contains(&edge(v1, v2)) || !run.fresh.is_empty() {
            return Err(Error::InvariantViolation(format!("edge ({v1}, {v2}) survived its elimination")));
        }
    }
    Ok(run.report)
}

/// Live checks: every fresh bad edge is `b(v_1..v_{j+1}) v` with `v ∈ Q_j`;
/// queues above index `k - 2` stay empty; cells around each active barycenter
/// have the nested shape the algorithm relies on.
fn check_invariants(
    run: &Run<'_>,
    vs: &[VertexId],
    bary: &[VertexId],
    queues: &[BTreeSet<VertexId>],
    top: usize,
    k: usize,
) -> Result<()> {
    if let Some(j) = (k.saturating_sub(1)..queues.len()).find(|&j| !queues[j].is_empty()) {
        return Err(Error::InvariantViolation(format!("queue Q_{j} is nonempty with k = {k}")));
    }
    let mut from_queues = BTreeSet::new();
    for (j, q) in queues.iter().enumerate().skip(1) {
        for &v in q {
            from_queues.insert(edge(bary[j + 1], v));
        }
    }
    if from_queues != run.fresh {
        return Err(Error::InvariantViolation(format!(
            "new bad edges {:?} differ from the queued ones {:?}",
            run.fresh, from_queues
        )));
    }
    for big_j in 2..=top {
        let b = bary[big_j];
        for cell in run.tri.cells_containing(b).iter().map(|&c| &run.tri.cells()[c]) {
            let has = |v: VertexId| cell.binary_search(&v).is_ok();
            let ok = (has(vs[1]) || has(vs[2])) && (3..=big_j).all(|i| has(vs[i]) || has(bary[i - 1]));
            if !ok {
                return Err(Error::InvariantViolation(format!(
                    "cell {cell:?} around barycenter {b} does not have the nested shape"
                )));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Default)]
pub struct MakeGoodReport {
    /// Bad edges of the initial labeling.
    pub initial_bad: usize,
    /// Bad-edge count after each round.
    pub bad_after_round: Vec<usize>,
    pub trace: Vec<TraceRecord>,
}

/// Labels `tri` and eliminates bad edges, smallest first, until every maximal
/// simplex is properly colored.
pub fn make_good(
    mut tri: Triangulation,
    oracle: &dyn CoverOracle,
    anchors: &AnchorTable,
    opts: &EliminationOptions,
) -> Result<(Triangulation, Labeling, MakeGoodReport)> {
    if anchors.colors() != oracle.colors() {
        return Err(Error::DimensionMismatch { expected: oracle.colors(), found: anchors.colors() });
    }
    let mut lab = initial_labeling(&tri, oracle, anchors)?;
    let mut bad = tri.bad_edges(&lab.color);
    let mut report = MakeGoodReport { initial_bad: bad.len(), ..Default::default() };
    while let Some(&e) = bad.iter().next() {
        let r = eliminate_tracked(&mut tri, &mut lab, e, oracle, anchors, opts, &mut bad)?;
        let expected = report.initial_bad - report.bad_after_round.len() - 1;
        if bad.len() != expected {
            return Err(Error::InvariantViolation(format!("{} bad edges after a round, expected {expected}", bad.len())));
        }
        report.bad_after_round.push(bad.len());
        report.trace.extend(r.trace);
    }
    if opts.check_claims {
        if tri.bad_edges(&lab.color) != bad {
            return Err(Error::InvariantViolation("tracked bad edges diverged from the triangulation".into()));
        }
        lab.verify(&tri, oracle, anchors)?;
        if !lab.is_good(&tri) {
            return Err(Error::InvariantViolation("a maximal simplex repeats a color".into()));
        }
    }
    Ok((tri, lab, report))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cover::{FnCover, PolyhedralCover};
    use crate::exact_math::rat;
    use crate::polytope::default_anchors;

    fn checked() -> EliminationOptions {
        EliminationOptions { check_claims: true, collect_trace: true, ..Default::default() }
    }

    fn segment() -> (Arc<PolytopeModel>, PolyhedralCover) {
        let seg = PolytopeModel::simplex(2).unwrap();
        let mut cover = PolyhedralCover::new(2);
        cover.add_threshold(&seg, &[0, 1], &rat(1, 2)).unwrap();
        (Arc::new(seg), cover)
    }

    #[test]
    fn choose_label_examples() {
        let (seg, cover) = segment();
        let e1 = RatPoint::unit(2, 0);
        let f1 = seg.face_by_vertices(&[0]).unwrap();
        assert_eq!(choose_label(&seg, &cover, &e1, &[0, 1]).unwrap(), (0, f1));
        assert_eq!(choose_label(&seg, &cover, &e1, &[1]).unwrap(), (1, f1));
        let empty = PolyhedralCover::new(2);
        match choose_label(&seg, &empty, &e1, &[0, 1]) {
            Err(Error::CoverViolation(cert)) => {
                assert_eq!(cert.subset, vec![0]);
                assert!(cert.revalidate(&empty, &seg).unwrap());
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn initial_labeling_examples() {
        let (seg, cover) = segment();
        let tri = Triangulation::initial(seg.clone()).unwrap();
        let anchors = default_anchors(&seg, 2);
        let lab = initial_labeling(&tri, &cover, &anchors).unwrap();
        assert_eq!(lab.color, vec![0, 0]);
        assert_eq!(lab.lambda, vec![seg.face_by_vertices(&[0]).unwrap(), seg.face_by_vertices(&[1]).unwrap()]);
        lab.verify(&tri, &cover, &anchors).unwrap();

        let everything = FnCover::new(3, |_, _, _: &RatPoint| true);
        let tri3 = Triangulation::initial(Arc::new(PolytopeModel::simplex(3).unwrap())).unwrap();
        let anchors3 = default_anchors(tri3.polytope(), 3);
        let lab3 = initial_labeling(&tri3, &everything, &anchors3).unwrap();
        assert_eq!(lab3.color, vec![0, 0, 0]);
    }

    #[test]
    fn path_of_three_segments() {
        // k = 2: a single bad edge gets one subdivision and no queue ever fills.
        let seg = Arc::new(PolytopeModel::simplex(2).unwrap());
        let pts = vec![
            RatPoint::unit(2, 0),
            RatPoint::new(vec![rat(2, 3), rat(1, 3)]),
            RatPoint::new(vec![rat(1, 3), rat(2, 3)]),
            RatPoint::unit(2, 1),
        ];
        let mut tri = Triangulation::from_cells(seg.clone(), pts.clone(), vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        let colors = [0usize, 1, 1, 2];
        let table = pts.clone();
        let oracle = FnCover::new(3, move |i, _, x: &RatPoint| match table.iter().position(|p| p == x) {
            Some(v) => colors[v] == i,
            None => true,
        });
        let anchors = default_anchors(&seg, 3);
        let mut lab = initial_labeling(&tri, &oracle, &anchors).unwrap();
        assert_eq!(lab.color, vec![0, 1, 1, 2]);
        let r = eliminate_bad_edge(&mut tri, &mut lab, (1, 2), &oracle, &anchors, &checked()).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.created, vec![4]);
        // The midpoint avoids color 1 and takes the smallest remaining color.
        assert_eq!(lab.color[4], 0);
        assert!(lab.is_good(&tri));
    }

    #[test]
    fn forced_collision_fills_first_queue_once() {
        let tri_p = Arc::new(PolytopeModel::simplex(3).unwrap());
        let mut tri = Triangulation::initial(tri_p.clone()).unwrap();
        // Vertices 0 and 1 share color 0; vertex 2 has color 1, and the midpoint
        // of 01 is forced to color 1 as well.
        let mid01 = RatPoint::new(vec![rat(1, 2), rat(1, 2), rat(0, 1)]);
        let oracle = FnCover::new(3, move |i, _, x: &RatPoint| {
            if x == &RatPoint::unit(3, 0) || x == &RatPoint::unit(3, 1) {
                i == 0
            } else if x == &RatPoint::unit(3, 2) || x == &mid01 {
                i == 1
            } else {
                i == 2
            }
        });
        let anchors = default_anchors(&tri_p, 3);
        let mut lab = initial_labeling(&tri, &oracle, &anchors).unwrap();
        let r = eliminate_bad_edge(&mut tri, &mut lab, (0, 1), &oracle, &anchors, &checked()).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.trace[1].j, Some(1));
        assert_eq!(r.trace[1].chosen, Some(2));
        assert_eq!(lab.color[4], 2);
        assert!(tri.bad_edges(&lab.color).is_empty());
    }

    #[test]
    fn make_good_without_bad_edges_is_identity() {
        let p = Arc::new(PolytopeModel::simplex(3).unwrap());
        let tri = Triangulation::initial(p.clone()).unwrap();
        let cover = PolyhedralCover::gale_threshold(&p, 3).unwrap();
        let anchors = default_anchors(&p, 3);
        let (out, lab, report) = make_good(tri.clone(), &cover, &anchors, &checked()).unwrap();
        assert_eq!(report.initial_bad, 3);
        assert_eq!(report.bad_after_round, vec![2, 1, 0]);
        assert!(lab.is_good(&out));

        // Vertices already carry distinct colors when each color covers only its own vertex.
        let mut own = PolyhedralCover::new(3);
        for j in 0..3 {
            let f = p.face_by_vertices(&[j]).unwrap();
            own.add(j, f, vec![]).unwrap();
        }
        let (out, _, report) = make_good(tri.clone(), &own, &anchors, &checked()).unwrap();
        assert_eq!(report.initial_bad, 0);
        assert_eq!(out.cells(), tri.cells());
    }

    #[test]
    fn single_covering_color_runs_out() {
        let p = Arc::new(PolytopeModel::simplex(2).unwrap());
        let tri = Triangulation::initial(p.clone()).unwrap();
        let only_first = FnCover::new(2, |i, _, _: &RatPoint| i == 0);
        let anchors = default_anchors(&p, 2);
        match make_good(tri, &only_first, &anchors, &checked()) {
            Err(Error::CoverViolation(cert)) => {
                assert_eq!(cert.subset, vec![1]);
                assert!(cert.revalidate(&only_first, &p).unwrap());
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }
}
