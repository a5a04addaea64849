//! Colorful piercing of `d`-interval families: the prefix-sum cover on a
//! simplex (general families) or on a product of simplices (separated
//! families), the solver run, and extraction of a colorful matching.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cover::{CoverOracle, FnCover};
use crate::error::{Error, Result};
use crate::exact_math::{LinearProgram, LpOutcome, Rat, RatPoint, Relation};
use crate::hypergraph::Hypergraph;
use crate::polytope::{default_anchors, factor_offsets, FaceId, PolytopeModel};
use crate::solver::{solve_with, SolveCertificate, SolveOptions};
use crate::wire::JsonRat;

/// A union of closed intervals `[a_t, b_t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DInterval {
    pub components: Vec<(Rat, Rat)>,
}

impl DInterval {
    pub fn new(components: Vec<(Rat, Rat)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyInput("d-interval components"));
        }
        if let Some((a, b)) = components.iter().find(|(a, b)| a > b) {
            return Err(Error::invalid(format!("component [{a}, {b}] is reversed")));
        }
        Ok(DInterval { components })
    }

    pub fn contains_point(&self, x: &Rat) -> bool {
        self.components.iter().any(|(a, b)| a <= x && x <= b)
    }

    /// Exact emptiness test of the intersection.
    pub fn meets(&self, other: &DInterval) -> bool {
        self.components.iter().any(|(a, b)| other.components.iter().any(|(c, d)| a <= d && c <= b))
    }

    fn mapped(&self, scale: &Rat, shift: &Rat) -> DInterval {
        DInterval { components: self.components.iter().map(|(a, b)| ((a - shift) * scale, (b - shift) * scale)).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// General `d`-intervals on a simplex with `k` vertices.
    General { k: usize },
    /// Separated `d`-intervals, the `t`-th component inside `(t, t + 1)` (0-based),
    /// on `(Δ^{m-1})^d` with `k = d(m - 1) + 1`.
    Separated { m: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiercingInstance {
    pub d: usize,
    pub variant: Variant,
    /// `families[i][member]`.
    pub families: Vec<Vec<DInterval>>,
}

/// A color subset whose union can be pierced by fewer points than required.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisFailure {
    pub subset: Vec<usize>,
    pub required: usize,
    pub piercing: Vec<Rat>,
}

/// `(family, member)` pairs of pairwise disjoint members, at most one per family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorfulMatching {
    pub pairs: Vec<(usize, usize)>,
}

impl ColorfulMatching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks colorfulness and pairwise disjointness.
    pub fn validate(&self, instance: &PiercingInstance) -> Result<()> {
        let families: BTreeSet<usize> = self.pairs.iter().map(|p| p.0).collect();
        if families.len() != self.pairs.len() {
            return Err(Error::InvariantViolation("matching uses a family twice".into()));
        }
        let members: Vec<&DInterval> = self
            .pairs
            .iter()
            .map(|&(i, j)| instance.families.get(i).and_then(|f| f.get(j)))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::InvariantViolation("matching names an unknown member".into()))?;
        for (a, x) in members.iter().enumerate() {
            for y in &members[a + 1..] {
                if x.meets(y) {
                    return Err(Error::InvariantViolation("matching members intersect".into()));
                }
            }
        }
        Ok(())
    }
}

impl PiercingInstance {
    pub fn general(d: usize, k: usize, families: Vec<Vec<DInterval>>) -> Result<Self> {
        let inst = PiercingInstance { d, variant: Variant::General { k }, families };
        inst.validate()?;
        Ok(inst)
    }

    pub fn separated(d: usize, m: usize, families: Vec<Vec<DInterval>>) -> Result<Self> {
        let inst = PiercingInstance { d, variant: Variant::Separated { m }, families };
        inst.validate()?;
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.families.len()
    }

    /// Dimension plus one of the polytope the solver runs on.
    pub fn k(&self) -> usize {
        match self.variant {
            Variant::General { k } => k,
            Variant::Separated { m } => self.d * (m - 1) + 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::invalid("d must be positive"));
        }
        match self.variant {
            Variant::General { k } if k < 2 => return Err(Error::invalid("general variant needs k >= 2")),
            // A member spanning all k pieces would need the whole simplex as its face.
            Variant::General { k } if k <= self.d => {
                return Err(Error::invalid(format!("general variant needs k > d, got k = {k}, d = {}", self.d)))
            }
            Variant::Separated { m } if m < 2 => return Err(Error::invalid("separated variant needs m >= 2")),
            _ => {}
        }
        if self.n() < self.k() {
            return Err(Error::invalid(format!("{} families, need at least k = {}", self.n(), self.k())));
        }
        for (i, fam) in self.families.iter().enumerate() {
            for (j, f) in fam.iter().enumerate() {
                match self.variant {
                    Variant::General { .. } if f.components.len() > self.d => {
                        return Err(Error::invalid(format!("member {j} of family {i} has more than d components")));
                    }
                    Variant::Separated { .. } => {
                        if f.components.len() != self.d {
                            return Err(Error::invalid(format!("member {j} of family {i} needs exactly d components")));
                        }
                        for (t, (a, b)) in f.components.iter().enumerate() {
                            let lo = Rat::from_integer((t as i64).into());
                            if a <= &lo || b >= &(&lo + Rat::one()) {
                                return Err(Error::invalid(format!(
                                    "component {t} of member {j} in family {i} is not inside ({t}, {})",
                                    t + 1
                                )));
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// For the general variant, the affine image with every component inside
    /// `(0, 1)`: `[lo - 1, hi + 1]` maps onto `[0, 1]`. Separated instances are
    /// already placed inside `(t, t + 1)` and are returned unchanged.
    pub fn normalized(&self) -> PiercingInstance {
        if let Variant::Separated { .. } = self.variant {
            return self.clone();
        }
        let ends = self.endpoints();
        let (Some(lo), Some(hi)) = (ends.first(), ends.last()) else {
            return self.clone();
        };
        let gap = Rat::one();
        let shift = lo - &gap;
        let scale = (hi - lo + &gap + &gap).recip();
        PiercingInstance {
            d: self.d,
            variant: self.variant,
            families: self.families.iter().map(|fam| fam.iter().map(|f| f.mapped(&scale, &shift)).collect()).collect(),
        }
    }

    /// Distinct endpoints in increasing order.
    pub fn endpoints(&self) -> Vec<Rat> {
        let set: BTreeSet<Rat> = self
            .families
            .iter()
            .flatten()
            .flat_map(|f| f.components.iter().flat_map(|(a, b)| [a.clone(), b.clone()]))
            .collect();
        set.into_iter().collect()
    }

    /// Piercing number of the union of the given families.
    pub fn piercing_number(&self, subset: &[usize]) -> Result<(usize, Vec<Rat>)> {
        let members: Vec<&DInterval> = subset.iter().flat_map(|&i| self.families[i].iter()).collect();
        // Some optimal piercing uses only right endpoints of components.
        let candidates: Vec<Rat> = members
            .iter()
            .flat_map(|f| f.components.iter().map(|(_, b)| b.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let edges: Vec<Vec<usize>> = members
            .iter()
            .map(|f| (0..candidates.len()).filter(|&c| f.contains_point(&candidates[c])).collect())
            .collect();
        let h = Hypergraph::new(candidates.len(), edges)?.with_edge_cap(usize::MAX);
        let cover = h.minimum_cover()?;
        Ok((cover.len(), cover.into_iter().map(|c| candidates[c].clone()).collect()))
    }

    /// Exact check that every union of `n - k + 1` families needs at least
    /// `k` (general) or `(m-1)d + 1` (separated) piercing points.
    pub fn check_hypothesis(&self, max_families: usize) -> Result<()> {
        let n = self.n();
        if n > max_families {
            return Err(Error::CapExceeded { what: "hypothesis check families", cap: max_families, found: n });
        }
        let k = self.k();
        let size = n - k + 1;
        for subset in combinations(n, size) {
            let (tau, piercing) = self.piercing_number(&subset)?;
            if tau < k {
                return Err(Error::HypothesisViolation(Box::new(HypothesisFailure { subset, required: k, piercing })));
            }
        }
        Ok(())
    }

    pub fn matching_bound(&self) -> usize {
        match self.variant {
            Variant::General { k } => k.div_ceil(self.d * self.d - self.d + 1),
            Variant::Separated { m } if self.d == 1 => m,
            Variant::Separated { m } => m.div_ceil(self.d - 1),
        }
    }
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

/// The prefix sums `p_x(1), ..., p_x(k)` of a point on the standard simplex.
pub fn prefix_points(x: &RatPoint) -> Result<Vec<Rat>> {
    if x.coords().iter().any(Signed::is_negative) || x.coords().iter().sum::<Rat>() != Rat::one() {
        return Err(Error::NotInPolytope(x.clone()));
    }
    let mut acc = Rat::zero();
    Ok(x.coords()
        .iter()
        .map(|c| {
            acc += c;
            acc.clone()
        })
        .collect())
}

/// Open intervals `(p_x(j-1), p_x(j))` for `j = 1, ..., len`, shifted by `offset`.
fn pieces(coords: &[Rat], offset: &Rat) -> Vec<(Rat, Rat)> {
    let mut lo = offset.clone();
    coords
        .iter()
        .map(|c| {
            let hi = &lo + c;
            let piece = (lo.clone(), hi.clone());
            lo = hi;
            piece
        })
        .collect()
}

/// Index of the open piece containing `[a, b]`, if one does.
fn piece_of(a: &Rat, b: &Rat, pieces: &[(Rat, Rat)]) -> Option<usize> {
    pieces.iter().position(|(lo, hi)| lo < a && b < hi)
}

/// The set of pieces holding the components of `f` when each lies inside one.
fn pieces_used(f: &DInterval, pieces: &[(Rat, Rat)]) -> Option<BTreeSet<usize>> {
    f.components.iter().map(|(a, b)| piece_of(a, b, pieces)).collect()
}

/// Whether `f` lies in the union of the pieces indexed by `t` and meets each of them.
pub fn general_witnesses(f: &DInterval, x: &RatPoint, t: &BTreeSet<usize>) -> bool {
    let ps = pieces(x.coords(), &Rat::zero());
    pieces_used(f, &ps).is_some_and(|used| &used == t)
}

/// Whether each component `f^t` lies in `(t + p(j_t - 1), t + p(j_t))` for the tuple `tuple`.
pub fn separated_witnesses(f: &DInterval, x: &RatPoint, factors: &[usize], tuple: &[usize]) -> bool {
    let offsets = factor_offsets(factors);
    f.components.iter().enumerate().all(|(t, (a, b))| {
        let ps = pieces(&x.coords()[offsets[t]..offsets[t] + factors[t]], &Rat::from_integer((t as i64).into()));
        piece_of(a, b, &ps) == Some(tuple[t])
    })
}

/// Oracle on `Δ^{k-1}`: `x ∈ A^i_{Δ^T}` iff some member of family `i` witnesses `T` at `x`.
pub fn interval_cover_oracle(
    instance: &PiercingInstance,
    polytope: &PolytopeModel,
) -> Result<impl CoverOracle + 'static> {
    let Variant::General { .. } = instance.variant else {
        return Err(Error::invalid("interval cover oracle needs the general variant"));
    };
    let faces: Vec<BTreeSet<usize>> = polytope.faces().iter().map(|f| f.vertex_ids.iter().copied().collect()).collect();
    let families = instance.families.clone();
    Ok(FnCover::new(families.len(), move |i: usize, face: FaceId, x: &RatPoint| {
        families[i].iter().any(|f| general_witnesses(f, x, &faces[face.0]))
    }))
}

/// Oracle on `(Δ^{m-1})^d`: only vertex faces `v_T` carry nonempty sets.
pub fn separated_cover_oracle(
    instance: &PiercingInstance,
    polytope: &PolytopeModel,
) -> Result<impl CoverOracle + 'static> {
    let Variant::Separated { m } = instance.variant else {
        return Err(Error::invalid("separated cover oracle needs the separated variant"));
    };
    let factors = vec![m; instance.d];
    let tuples: Vec<Option<Vec<usize>>> = polytope.faces().iter().map(|f| polytope.vertex_tuple(f.id)).collect();
    let families = instance.families.clone();
    Ok(FnCover::new(families.len(), move |i: usize, face: FaceId, x: &RatPoint| match &tuples[face.0] {
        Some(t) => families[i].iter().any(|f| separated_witnesses(f, x, &factors, t)),
        None => false,
    }))
}

#[derive(Clone, Debug)]
pub struct PierceOptions {
    pub check_hypothesis: bool,
    /// Largest family count accepted by the exact hypothesis check.
    pub hypothesis_cap: usize,
    /// Halvings of `eps` tried when witness members collide.
    pub retries: usize,
    pub solve: SolveOptions,
}

impl Default for PierceOptions {
    fn default() -> Self {
        PierceOptions { check_hypothesis: true, hypothesis_cap: 12, retries: 6, solve: SolveOptions::default() }
    }
}

#[derive(Clone, Debug)]
pub struct PierceOutcome {
    pub matching: ColorfulMatching,
    /// Point at which each matched member witnesses its face (normalized coordinates).
    pub points: Vec<RatPoint>,
    /// Face vertex sets and ids of the matched members, aligned with `matching.pairs`.
    pub matched_faces: Vec<Vec<usize>>,
    pub matched_face_ids: Vec<FaceId>,
    pub certificate: SolveCertificate,
    pub polytope: Arc<PolytopeModel>,
    /// Face vertex sets `T_1, ..., T_k` from the certificate.
    pub faces: Vec<Vec<usize>>,
    pub eps: Rat,
}

/// Starting `eps`. Coarse on purpose: the certificate is exact at any `eps`, and
/// [`pierce`] halves it only when the chosen members collide.
pub fn default_eps(_instance: &PiercingInstance) -> Rat {
    Rat::new(1.into(), 4.into())
}

/// Finds a colorful matching of the guaranteed size.
pub fn pierce(instance: &PiercingInstance, eps: Option<Rat>, opts: &PierceOptions) -> Result<PierceOutcome> {
    if opts.check_hypothesis {
        instance.check_hypothesis(opts.hypothesis_cap)?;
    }
    let norm = instance.normalized();
    let mut eps = eps.unwrap_or_else(|| default_eps(instance));
    let mut attempt = 0;
    loop {
        match pierce_at(instance, &norm, &eps, opts) {
            Ok(Some(out)) => return Ok(out),
            Ok(None) if attempt < opts.retries => {
                attempt += 1;
                eps /= Rat::from_integer(2.into());
            }
            Ok(None) => {
                return Err(Error::Internal(format!(
                    "witness members still collide after {} halvings of eps",
                    opts.retries
                )))
            }
            Err(e) => return Err(e),
        }
    }
}

/// Piece index of each component of `f` at `x`, when every component sits inside one.
fn placement(f: &DInterval, x: &RatPoint, factors: &[usize], separated: bool) -> Option<Vec<usize>> {
    let offsets = factor_offsets(factors);
    f.components
        .iter()
        .enumerate()
        .map(|(c, (a, b))| {
            let block = if separated { c } else { 0 };
            let shift = Rat::from_integer((if separated { c as i64 } else { 0 }).into());
            piece_of(a, b, &pieces(&x.coords()[offsets[block]..offsets[block] + factors[block]], &shift))
        })
        .collect()
}

/// A point where every member has each component strictly inside its assigned
/// piece, found by maximizing the slack.
fn common_point(placed: &[(&DInterval, &[usize])], factors: &[usize], separated: bool) -> Option<RatPoint> {
    let offsets = factor_offsets(factors);
    let dim: usize = factors.iter().sum();
    let s = dim;
    let mut lp = LinearProgram::new(dim + 1).maximize({
        let mut obj = vec![Rat::zero(); dim + 1];
        obj[s] = Rat::one();
        obj
    });
    let mut cap = vec![Rat::zero(); dim + 1];
    cap[s] = Rat::one();
    lp.constrain(cap, Relation::Le, Rat::one());
    for (t, &len) in factors.iter().enumerate() {
        let mut row = vec![Rat::zero(); dim + 1];
        row[offsets[t]..offsets[t] + len].iter_mut().for_each(|c| *c = Rat::one());
        lp.constrain(row, Relation::Eq, Rat::one());
    }
    for (f, js) in placed {
        for (c, ((a, b), &j)) in f.components.iter().zip(js.iter()).enumerate() {
            let block = if separated { c } else { 0 };
            let shift = Rat::from_integer((if separated { c as i64 } else { 0 }).into());
            let o = offsets[block];
            let mut lower = vec![Rat::zero(); dim + 1];
            lower[o..o + j].iter_mut().for_each(|v| *v = Rat::one());
            lower[s] = Rat::one();
            lp.constrain(lower, Relation::Le, a - &shift);
            let mut upper = vec![Rat::zero(); dim + 1];
            upper[o..=o + j].iter_mut().for_each(|v| *v = -Rat::one());
            upper[s] = Rat::one();
            lp.constrain(upper, Relation::Le, &shift - b);
        }
    }
    match lp.solve().ok()? {
        LpOutcome::Optimal { value, solution } if value.is_positive() => Some(RatPoint::new(solution[..dim].to_vec())),
        _ => None,
    }
}

/// One way to seat a member: its index, the member, the piece of each component,
/// and the hypergraph vertices those pieces stand for.
struct Seat<'a> {
    member: usize,
    interval: &'a DInterval,
    pieces: Vec<usize>,
    vertices: BTreeSet<usize>,
}

impl<'a> Seat<'a> {
    fn new(member: usize, interval: &'a DInterval, pieces: Vec<usize>, m: Option<usize>) -> Self {
        let vertices = match m {
            Some(m) => pieces.iter().enumerate().map(|(t, j)| t * m + j).collect(),
            None => pieces.iter().copied().collect(),
        };
        Seat { member, interval, pieces, vertices }
    }
}

/// Backtracking over one seat per matched family: seats with disjoint members and
/// disjoint vertex sets are kept while a common witness point still exists.
fn search_common(
    options: &[Vec<Seat<'_>>],
    factors: &[usize],
    separated: bool,
    budget: &mut usize,
    picked: &mut Vec<usize>,
) -> Option<(RatPoint, Vec<(usize, Vec<usize>)>)> {
    let depth = picked.len();
    if depth > 0 {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let placed: Vec<(&DInterval, &[usize])> = picked
            .iter()
            .enumerate()
            .map(|(i, &o)| (options[i][o].interval, options[i][o].pieces.as_slice()))
            .collect();
        let y = common_point(&placed, factors, separated)?;
        if depth == options.len() {
            let seats = picked.iter().enumerate().map(|(i, &o)| (options[i][o].member, options[i][o].pieces.clone()));
            return Some((y, seats.collect()));
        }
    }
    for (o, seat) in options[depth].iter().enumerate() {
        let clash = picked.iter().enumerate().any(|(i, &p)| {
            let other = &options[i][p];
            other.interval.meets(seat.interval) || !other.vertices.is_disjoint(&seat.vertices)
        });
        if clash {
            continue;
        }
        picked.push(o);
        if let Some(found) = search_common(options, factors, separated, budget, picked) {
            return Some(found);
        }
        picked.pop();
        if *budget == 0 {
            return None;
        }
    }
    None
}

/// Every seat of `f`: nondecreasing pieces of `0..k` for the general variant, any
/// piece per factor for the separated one.
fn all_seats<'a>(member: usize, f: &'a DInterval, factors: &[usize], separated: bool) -> Vec<Seat<'a>> {
    let d = f.components.len();
    let mut out = Vec::new();
    let mut cur = vec![0usize; d];
    loop {
        let monotone = separated || cur.windows(2).all(|w| w[0] <= w[1]);
        if monotone {
            out.push(Seat::new(member, f, cur.clone(), separated.then(|| factors[0])));
        }
        let mut c = d;
        loop {
            if c == 0 {
                return out;
            }
            c -= 1;
            let cap = if separated { factors[c] } else { factors[0] };
            cur[c] += 1;
            if cur[c] < cap {
                break;
            }
            cur[c] = 0;
        }
    }
}

/// Cap on exact LPs tried while looking for a common witness point.
const COMMON_POINT_BUDGET: usize = 4096;

/// One attempt; `Ok(None)` when the chosen witnesses are not pairwise disjoint.
fn pierce_at(
    instance: &PiercingInstance,
    norm: &PiercingInstance,
    eps: &Rat,
    opts: &PierceOptions,
) -> Result<Option<PierceOutcome>> {
    let k = instance.k();
    let (polytope, oracle): (Arc<PolytopeModel>, Box<dyn CoverOracle>) = match instance.variant {
        Variant::General { k } => {
            let p = Arc::new(PolytopeModel::simplex(k)?);
            let o = interval_cover_oracle(norm, &p)?;
            (p, Box::new(o))
        }
        Variant::Separated { m } => {
            let p = Arc::new(PolytopeModel::simplex_product(m, instance.d)?);
            let o = separated_cover_oracle(norm, &p)?;
            (p, Box::new(o))
        }
    };
    let anchors = default_anchors(&polytope, instance.n());
    let solution = solve_with(polytope.clone(), oracle.as_ref(), &anchors, eps, &opts.solve)?;
    let cert = solution.certificate;
    let faces: Vec<Vec<usize>> = cert.faces.iter().map(|&f| polytope.face(f).vertex_ids.clone()).collect();

    let (h, weights) = match instance.variant {
        Variant::General { .. } => {
            let edges = faces.clone();
            if let Some(e) = edges.iter().find(|e| e.len() > instance.d) {
                return Err(Error::Internal(format!("certificate face {e:?} has more than d vertices")));
            }
            let kr = Rat::from_integer((k as i64).into());
            let w: Vec<Rat> = cert
                .coeffs
                .iter()
                .zip(&edges)
                .map(|(c, e)| &kr * c / Rat::from_integer((e.len() as i64).into()))
                .collect();
            (Hypergraph::new(k, edges)?, w)
        }
        Variant::Separated { m } => {
            let mut edges = Vec::with_capacity(k);
            for &f in &cert.faces {
                let tuple = polytope
                    .vertex_tuple(f)
                    .ok_or_else(|| Error::Internal("separated certificate uses a non-vertex face".into()))?;
                edges.push(tuple.iter().enumerate().map(|(t, &j)| t * m + j).collect::<Vec<_>>());
            }
            let parts: Vec<Vec<usize>> = (0..instance.d).map(|t| (t * m..(t + 1) * m).collect()).collect();
            let mr = Rat::from_integer((m as i64).into());
            let w: Vec<Rat> = cert.coeffs.iter().map(|c| &mr * c).collect();
            (Hypergraph::new(m * instance.d, edges)?.with_parts(parts)?, w)
        }
    };
    if !h.is_perfect_fractional_matching(&weights) {
        return Err(Error::Internal("hull coefficients do not give a perfect fractional matching".into()));
    }
    let chosen = h.maximum_matching()?;

    let witnesses_at = |i: usize, j: usize, x: &RatPoint| -> bool {
        let f = &norm.families[cert.pi[i]][j];
        match instance.variant {
            Variant::General { .. } => general_witnesses(f, x, &faces[i].iter().copied().collect()),
            Variant::Separated { m } => {
                let tuple = polytope.vertex_tuple(cert.faces[i]).expect("checked above");
                separated_witnesses(f, x, &vec![m; instance.d], &tuple)
            }
        }
    };
    let witnesses = |i: usize, x: &RatPoint| -> Option<usize> {
        (0..norm.families[cert.pi[i]].len()).find(|&j| witnesses_at(i, j, x))
    };
    let mut pairs = Vec::with_capacity(chosen.len());
    let mut points = Vec::with_capacity(chosen.len());
    for &i in &chosen {
        let x = &cert.witness_points[i];
        let member = witnesses(i, x)
            .ok_or_else(|| Error::Internal(format!("no member of family {} witnesses its face", cert.pi[i])))?;
        pairs.push((cert.pi[i], member));
        points.push(x.clone());
    }
    let mut matching = ColorfulMatching { pairs };
    let mut reseated: Option<Vec<FaceId>> = None;
    if matching.validate(instance).is_err() {
        // Members chosen at one common point sit in disjoint pieces of the same partition.
        let factors = match instance.variant {
            Variant::General { k } => vec![k],
            Variant::Separated { m } => vec![m; instance.d],
        };
        let separated = matches!(instance.variant, Variant::Separated { .. });
        let m = separated.then(|| factors[0]);
        let narrow: Vec<Vec<Seat<'_>>> = chosen
            .iter()
            .map(|&i| {
                let mut seats: Vec<Seat<'_>> = Vec::new();
                for x in &cert.witness_points {
                    for (j, f) in norm.families[cert.pi[i]].iter().enumerate() {
                        if witnesses_at(i, j, x) {
                            let pl = placement(f, x, &factors, separated).expect("witness has a placement");
                            if !seats.iter().any(|s| s.member == j && s.pieces == pl) {
                                seats.push(Seat::new(j, f, pl, m));
                            }
                        }
                    }
                }
                seats
            })
            .collect();
        // The wide search keeps the matched families but reseats their members freely.
        let wide = || -> Vec<Vec<Seat<'_>>> {
            chosen
                .iter()
                .map(|&i| {
                    norm.families[cert.pi[i]]
                        .iter()
                        .enumerate()
                        .flat_map(|(j, f)| all_seats(j, f, &factors, separated))
                        .collect()
                })
                .collect()
        };
        let mut budget = COMMON_POINT_BUDGET;
        let found = search_common(&narrow, &factors, separated, &mut budget, &mut Vec::new()).or_else(|| {
            let mut budget = COMMON_POINT_BUDGET;
            search_common(&wide(), &factors, separated, &mut budget, &mut Vec::new())
        });
        let Some((y, seats)) = found else {
            return Ok(None);
        };
        let mut pairs = Vec::with_capacity(chosen.len());
        let mut seated_faces = Vec::with_capacity(chosen.len());
        for (&i, (j, pl)) in chosen.iter().zip(seats) {
            let face = match m {
                Some(_) => polytope.tuple_face(&pl),
                None => {
                    let ids: Vec<usize> = pl.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
                    polytope.face_by_vertices(&ids)
                }
            };
            let Some(face) = face else {
                return Ok(None);
            };
            pairs.push((cert.pi[i], j));
            seated_faces.push(face);
        }
        matching = ColorfulMatching { pairs };
        points = vec![y; chosen.len()];
        reseated = Some(seated_faces);
    }
    if matching.validate(instance).is_err() {
        return Ok(None);
    }
    if matching.len() < instance.matching_bound() {
        return Err(Error::Internal(format!(
            "matching of size {} is below the bound {}",
            matching.len(),
            instance.matching_bound()
        )));
    }
    let matched_face_ids: Vec<FaceId> = reseated.unwrap_or_else(|| chosen.iter().map(|&i| cert.faces[i]).collect());
    let matched_faces = matched_face_ids.iter().map(|&f| polytope.face(f).vertex_ids.clone()).collect();
    Ok(Some(PierceOutcome {
        matching,
        points,
        matched_faces,
        matched_face_ids,
        certificate: cert,
        polytope,
        faces,
        eps: eps.clone(),
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantJson {
    General,
    Separated,
}

/// `{ "variant", "d", "k" | "m", "families": [[[ [a, b], ... ], ...], ...] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub variant: VariantJson,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub families: Vec<Vec<Vec<(JsonRat, JsonRat)>>>,
}

impl InstanceJson {
    pub fn into_instance(self) -> Result<PiercingInstance> {
        let families = self
            .families
            .into_iter()
            .map(|fam| {
                fam.into_iter()
                    .map(|member| DInterval::new(member.into_iter().map(|(a, b)| (a.0, b.0)).collect()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        match self.variant {
            VariantJson::General => {
                let k = self.k.ok_or_else(|| Error::invalid("general instance needs k"))?;
                PiercingInstance::general(self.d, k, families)
            }
            VariantJson::Separated => {
                let m = self.m.ok_or_else(|| Error::invalid("separated instance needs m"))?;
                PiercingInstance::separated(self.d, m, families)
            }
        }
    }

    pub fn from_instance(inst: &PiercingInstance) -> Self {
        let (variant, k, m) = match inst.variant {
            Variant::General { k } => (VariantJson::General, Some(k), None),
            Variant::Separated { m } => (VariantJson::Separated, None, Some(m)),
        };
        InstanceJson {
            variant,
            d: inst.d,
            k,
            m,
            families: inst
                .families
                .iter()
                .map(|fam| {
                    fam.iter()
                        .map(|f| f.components.iter().map(|(a, b)| (JsonRat::from(a), JsonRat::from(b))).collect())
                        .collect()
                })
                .collect(),
        }
    }
}
