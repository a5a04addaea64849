//! Dividing `d` cakes, each cut into `m` interval pieces, among players who
//! each want one `d`-tuple of pieces (one piece per cake), so that the
//! allocated tuples are pairwise disjoint.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cover::{falsify_weak_cover, CoverOracle, FnCover, ViolationCertificate};
use crate::error::{Error, Result};
use crate::exact_math::{Rat, RatPoint};
use crate::hypergraph::Hypergraph;
use crate::polytope::{default_anchors, PolytopeModel};
use crate::solver::{solve_with, SolveCertificate, SolveOptions};
use crate::wire::JsonRat;

/// One point `x^t ∈ Δ^{m-1}` per cake; piece `j` of cake `t` has length `x^t_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub cakes: Vec<RatPoint>,
}

impl Partition {
    pub fn new(cakes: Vec<RatPoint>) -> Result<Self> {
        if cakes.is_empty() {
            return Err(Error::EmptyInput("partition cakes"));
        }
        let m = cakes[0].dim();
        for x in &cakes {
            if x.dim() != m {
                return Err(Error::DimensionMismatch { expected: m, found: x.dim() });
            }
            if x.coords().iter().any(|c| c < &Rat::zero()) || x.coords().iter().sum::<Rat>() != Rat::one() {
                return Err(Error::NotInPolytope(x.clone()));
            }
        }
        Ok(Partition { cakes })
    }

    /// Splits a point of `(Δ^{m-1})^d` into its cakes.
    pub fn from_point(x: &RatPoint, m: usize, d: usize) -> Result<Self> {
        if x.dim() != m * d {
            return Err(Error::DimensionMismatch { expected: m * d, found: x.dim() });
        }
        Partition::new((0..d).map(|t| RatPoint::new(x.coords()[t * m..(t + 1) * m].to_vec())).collect())
    }

    pub fn m(&self) -> usize {
        self.cakes[0].dim()
    }

    pub fn d(&self) -> usize {
        self.cakes.len()
    }

    /// `(start, end)` of piece `j` of cake `t`.
    pub fn piece(&self, t: usize, j: usize) -> (Rat, Rat) {
        let c = self.cakes[t].coords();
        let start: Rat = c[..j].iter().sum();
        let end = &start + &c[j];
        (start, end)
    }

    pub fn is_nonempty(&self, tuple: &[usize]) -> bool {
        tuple.iter().enumerate().all(|(t, &j)| self.cakes[t][j] > Rat::zero())
    }

    /// The `m - 1` interior cut positions of cake `t`.
    pub fn cuts(&self, t: usize) -> Vec<Rat> {
        let m = self.m();
        (1..m).map(|j| self.piece(t, j).0).collect()
    }
}

/// All tuples in `[m]^d`, lexicographic.
pub fn all_tuples(m: usize, d: usize) -> Vec<Vec<usize>> {
    let total = m.pow(d as u32);
    (0..total)
        .map(|mut id| {
            let mut t = vec![0; d];
            for slot in t.iter_mut().rev() {
                *slot = id % m;
                id /= m;
            }
            t
        })
        .collect()
}

/// A player's preference oracle. Must be a pure function of its arguments.
pub trait PlayerModel: Send + Sync {
    fn prefers(&self, x: &Partition, tuple: &[usize]) -> bool;
}

impl<T: PlayerModel + ?Sized> PlayerModel for Box<T> {
    fn prefers(&self, x: &Partition, tuple: &[usize]) -> bool {
        (**self).prefers(x, tuple)
    }
}

/// Constant density `value` on `[from, to]` of one cake (cakes live on `[0, 1]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub value: Rat,
    pub from: Rat,
    pub to: Rat,
}

impl Step {
    fn measure(&self, a: &Rat, b: &Rat) -> Rat {
        let lo = if a > &self.from { a } else { &self.from };
        let hi = if b < &self.to { b } else { &self.to };
        if hi > lo {
            &self.value * (hi - lo)
        } else {
            Rat::zero()
        }
    }
}

/// Prefers the tuples of nonempty pieces with the largest total measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HungryMax {
    /// `densities[t]`: steps of cake `t`.
    pub densities: Vec<Vec<Step>>,
    /// When true only the lexicographically smallest maximizer is preferred.
    pub lex_tie_break: bool,
}

impl HungryMax {
    pub fn new(densities: Vec<Vec<Step>>) -> Result<Self> {
        for s in densities.iter().flatten() {
            if s.value < Rat::zero() || s.from > s.to {
                return Err(Error::invalid(format!("bad density step {} on [{}, {}]", s.value, s.from, s.to)));
            }
        }
        Ok(HungryMax { densities, lex_tie_break: true })
    }

    /// Prefer every maximizer, which keeps preference sets closed.
    pub fn with_ties(mut self) -> Self {
        self.lex_tie_break = false;
        self
    }

    pub fn measure(&self, x: &Partition, tuple: &[usize]) -> Rat {
        tuple
            .iter()
            .enumerate()
            .map(|(t, &j)| {
                let (a, b) = x.piece(t, j);
                self.densities.get(t).map_or_else(Rat::zero, |steps| steps.iter().map(|s| s.measure(&a, &b)).sum())
            })
            .sum()
    }

    fn best(&self, x: &Partition) -> (Rat, Option<Vec<usize>>) {
        let mut best: (Rat, Option<Vec<usize>>) = (Rat::zero(), None);
        for t in all_tuples(x.m(), x.d()) {
            if !x.is_nonempty(&t) {
                continue;
            }
            let v = self.measure(x, &t);
            if best.1.is_none() || v > best.0 {
                best = (v, Some(t));
            }
        }
        best
    }
}

impl PlayerModel for HungryMax {
    fn prefers(&self, x: &Partition, tuple: &[usize]) -> bool {
        if tuple.len() != x.d() || tuple.iter().any(|&j| j >= x.m()) || !x.is_nonempty(tuple) {
            return false;
        }
        let (value, first) = self.best(x);
        if self.lex_tie_break {
            first.as_deref() == Some(tuple)
        } else {
            self.measure(x, tuple) == value
        }
    }
}

/// Prefers the first listed tuple whose pieces are all nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TablePlayer {
    pub order: Vec<Vec<usize>>,
}

impl PlayerModel for TablePlayer {
    fn prefers(&self, x: &Partition, tuple: &[usize]) -> bool {
        self.order.iter().find(|t| t.len() == x.d() && x.is_nonempty(t)).is_some_and(|t| t == tuple)
    }
}

/// A player given by a closure.
pub struct FnPlayer<F>(pub F);

impl<F> PlayerModel for FnPlayer<F>
where
    F: Fn(&Partition, &[usize]) -> bool + Send + Sync,
{
    fn prefers(&self, x: &Partition, tuple: &[usize]) -> bool {
        (self.0)(x, tuple)
    }
}

/// A division problem: `d` cakes, `m` pieces each.
pub struct CakeProblem {
    pub m: usize,
    pub d: usize,
    pub players: Vec<Box<dyn PlayerModel>>,
}

impl CakeProblem {
    pub fn new(m: usize, d: usize, players: Vec<Box<dyn PlayerModel>>) -> Result<Self> {
        if m < 2 || d < 1 {
            return Err(Error::invalid("need m >= 2 and d >= 1"));
        }
        let k = d * (m - 1) + 1;
        if players.len() < k {
            return Err(Error::invalid(format!("{} players, need at least d(m-1)+1 = {k}", players.len())));
        }
        Ok(CakeProblem { m, d, players })
    }

    pub fn k(&self) -> usize {
        self.d * (self.m - 1) + 1
    }

    pub fn polytope(&self) -> Result<PolytopeModel> {
        PolytopeModel::simplex_product(self.m, self.d)
    }

    pub fn allocation_bound(&self) -> usize {
        if self.d == 1 {
            self.m
        } else {
            self.m.div_ceil(self.d - 1)
        }
    }
}

/// `A^i_{v_T} = { x : player i prefers T at x }`; faces other than vertices carry empty sets.
pub fn preference_cover_oracle<'a>(problem: &'a CakeProblem, polytope: &PolytopeModel) -> impl CoverOracle + 'a {
    let tuples: Vec<Option<Vec<usize>>> = polytope.faces().iter().map(|f| polytope.vertex_tuple(f.id)).collect();
    let (m, d) = (problem.m, problem.d);
    FnCover::new(problem.players.len(), move |i, face, x: &RatPoint| match &tuples[face.0] {
        Some(t) => Partition::from_point(x, m, d).is_ok_and(|p| problem.players[i].prefers(&p, t)),
        None => false,
    })
}

/// Samples partitions looking for one where `n - d(m-1)` players prefer no
/// tuple of nonempty pieces. `None` is not a proof of hungriness.
pub fn check_hungry(problem: &CakeProblem, samples: usize, seed: u64) -> Result<Option<ViolationCertificate>> {
    let polytope = problem.polytope()?;
    let oracle = preference_cover_oracle(problem, &polytope);
    falsify_weak_cover(&oracle, &polytope, problem.k(), samples, seed)
}

#[derive(Clone, Debug)]
pub struct Allocation {
    /// `(player, tuple)` with 0-based piece indices.
    pub pairs: Vec<(usize, Vec<usize>)>,
    pub partition: Partition,
    pub certificate: SolveCertificate,
    pub eps: Rat,
}

impl Allocation {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Disjointness per cake, distinct players, nonempty pieces and one preference query each.
    pub fn validate(&self, problem: &CakeProblem) -> Result<()> {
        for (a, (pa, ta)) in self.pairs.iter().enumerate() {
            if *pa >= problem.players.len() {
                return Err(Error::InvariantViolation(format!("unknown player {pa}")));
            }
            if !self.partition.is_nonempty(ta) {
                return Err(Error::InvariantViolation(format!("player {pa} gets an empty piece")));
            }
            if !problem.players[*pa].prefers(&self.partition, ta) {
                return Err(Error::InvariantViolation(format!("player {pa} does not prefer {ta:?}")));
            }
            for (pb, tb) in &self.pairs[a + 1..] {
                if pa == pb {
                    return Err(Error::InvariantViolation(format!("player {pa} allocated twice")));
                }
                if ta.iter().zip(tb).any(|(x, y)| x == y) {
                    return Err(Error::InvariantViolation(format!("tuples {ta:?} and {tb:?} share a piece")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct DivideOptions {
    pub retries: usize,
    pub solve: SolveOptions,
}

impl Default for DivideOptions {
    fn default() -> Self {
        DivideOptions { retries: 6, solve: SolveOptions::default() }
    }
}

pub fn divide(problem: &CakeProblem, eps: &Rat) -> Result<Allocation> {
    divide_with(problem, eps, &DivideOptions::default())
}

/// Solves on `(Δ^{m-1})^d`, matches the certificate's tuples, and re-checks
/// every allocated preference at the witness simplex's first vertex; halves
/// `eps` when a re-check fails.
pub fn divide_with(problem: &CakeProblem, eps: &Rat, opts: &DivideOptions) -> Result<Allocation> {
    let polytope = Arc::new(problem.polytope()?);
    let mut eps = eps.clone();
    let mut last = String::new();
    for _ in 0..=opts.retries {
        match divide_at(problem, &polytope, &eps, opts)? {
            Ok(alloc) => return Ok(alloc),
            Err(why) => last = why,
        }
        eps /= Rat::from_integer(2.into());
    }
    Err(Error::Internal(format!("allocation re-check still fails after {} halvings of eps: {last}", opts.retries)))
}

fn divide_at(
    problem: &CakeProblem,
    polytope: &Arc<PolytopeModel>,
    eps: &Rat,
    opts: &DivideOptions,
) -> Result<std::result::Result<Allocation, String>> {
    let (m, d) = (problem.m, problem.d);
    let oracle = preference_cover_oracle(problem, polytope);
    let anchors = default_anchors(polytope, problem.players.len());
    let cert = solve_with(polytope.clone(), &oracle, &anchors, eps, &opts.solve)?.certificate;

    let mut tuples = Vec::with_capacity(cert.faces.len());
    for &f in &cert.faces {
        tuples.push(
            polytope.vertex_tuple(f).ok_or_else(|| Error::Internal("certificate uses a non-vertex face".into()))?,
        );
    }
    let edges: Vec<Vec<usize>> =
        tuples.iter().map(|t| t.iter().enumerate().map(|(c, &j)| c * m + j).collect()).collect();
    let parts: Vec<Vec<usize>> = (0..d).map(|c| (c * m..(c + 1) * m).collect()).collect();
    let h = Hypergraph::new(m * d, edges)?.with_parts(parts)?;
    let mr = Rat::from_integer((m as i64).into());
    let weights: Vec<Rat> = cert.coeffs.iter().map(|c| &mr * c).collect();
    if !h.is_perfect_fractional_matching(&weights) {
        return Err(Error::Internal("hull coefficients do not give a perfect fractional matching".into()));
    }
    let matched = h.maximum_matching()?;
    let partition = Partition::from_point(&cert.witness_points[0], m, d)?;
    let alloc = Allocation {
        pairs: matched.iter().map(|&i| (cert.pi[i], tuples[i].clone())).collect(),
        partition,
        certificate: cert,
        eps: eps.clone(),
    };
    if let Err(e) = alloc.validate(problem) {
        return Ok(Err(e.to_string()));
    }
    if alloc.len() < problem.allocation_bound() {
        return Err(Error::Internal(format!(
            "allocation of size {} is below the bound {}",
            alloc.len(),
            problem.allocation_bound()
        )));
    }
    Ok(Ok(alloc))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PlayerJson {
    /// `densities[t]` lists `[value, from, to]` steps for cake `t`.
    HungryMax {
        densities: Vec<Vec<(JsonRat, JsonRat, JsonRat)>>,
        #[serde(default)]
        ties: bool,
    },
    Table { order: Vec<Vec<usize>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CakeJson {
    pub m: usize,
    pub d: usize,
    pub players: Vec<PlayerJson>,
}

impl CakeJson {
    pub fn into_problem(self) -> Result<CakeProblem> {
        let players = self
            .players
            .into_iter()
            .map(|p| -> Result<Box<dyn PlayerModel>> {
                Ok(match p {
                    PlayerJson::HungryMax { densities, ties } => {
                        let h = HungryMax::new(
                            densities
                                .into_iter()
                                .map(|cake| {
                                    cake.into_iter().map(|(v, a, b)| Step { value: v.0, from: a.0, to: b.0 }).collect()
                                })
                                .collect(),
                        )?;
                        Box::new(if ties { h.with_ties() } else { h })
                    }
                    PlayerJson::Table { order } => Box::new(TablePlayer { order }),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        CakeProblem::new(self.m, self.d, players)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationPairJson {
    pub player: usize,
    pub tuple: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationJson {
    pub allocation: Vec<AllocationPairJson>,
    /// Interior cut positions per cake.
    pub cuts: Vec<Vec<JsonRat>>,
    /// Piece lengths per cake.
    pub partition: Vec<Vec<JsonRat>>,
    pub eps: JsonRat,
}

impl AllocationJson {
    pub fn from_allocation(a: &Allocation) -> Self {
        AllocationJson {
            allocation: a.pairs.iter().map(|(p, t)| AllocationPairJson { player: *p, tuple: t.clone() }).collect(),
            cuts: (0..a.partition.d()).map(|t| a.partition.cuts(t).iter().map(JsonRat::from).collect()).collect(),
            partition: a.partition.cakes.iter().map(|x| x.coords().iter().map(JsonRat::from).collect()).collect(),
            eps: JsonRat::from(&a.eps),
        }
    }
}
