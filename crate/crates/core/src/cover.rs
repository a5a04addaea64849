//! Face-indexed colored set families `A^i_τ` given as membership oracles,
//! and sampling-based falsification of the weak cover property.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact_math::{Rat, RatPoint};
use crate::polytope::{FaceId, PolytopeModel, Support};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Openness {
    ClosedSets,
    OpenSets,
}

/// Membership oracle for a family `(A^i_τ)` indexed by color `i` and proper face `τ`.
pub trait CoverOracle: Send + Sync {
    fn colors(&self) -> usize;

    /// Whether `x` lies in `A^color_face`.
    fn contains(&self, color: usize, face: FaceId, x: &RatPoint) -> bool;

    fn openness(&self) -> Openness {
        Openness::ClosedSets
    }
}

impl<T: CoverOracle + ?Sized> CoverOracle for &T {
    fn colors(&self) -> usize {
        (**self).colors()
    }

    fn contains(&self, color: usize, face: FaceId, x: &RatPoint) -> bool {
        (**self).contains(color, face, x)
    }

    fn openness(&self) -> Openness {
        (**self).openness()
    }
}

/// Closed halfspace `normal · x >= offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl Halfspace {
    pub fn new(normal: Vec<Rat>, offset: Rat) -> Self {
        Halfspace { normal, offset }
    }

    /// `x_coord >= t`.
    pub fn coordinate_at_least(dim: usize, coord: usize, t: Rat) -> Self {
        let mut normal = vec![Rat::zero(); dim];
        normal[coord] = Rat::one();
        Halfspace { normal, offset: t }
    }

    pub fn contains(&self, x: &RatPoint) -> bool {
        let dot: Rat = self.normal.iter().zip(x.coords()).map(|(a, b)| a * b).sum();
        dot >= self.offset
    }
}

/// A family whose sets are finite unions of polyhedra (intersections of
/// closed halfspaces). Absent `(color, face)` pairs denote empty sets.
#[derive(Clone, Debug, Default)]
pub struct PolyhedralCover {
    colors: usize,
    sets: BTreeMap<(usize, FaceId), Vec<Vec<Halfspace>>>,
}

impl PolyhedralCover {
    pub fn new(colors: usize) -> Self {
        PolyhedralCover { colors, sets: BTreeMap::new() }
    }

    /// Adds the polyhedron `∩ halfspaces` to `A^color_face`. An empty list adds the whole space.
    pub fn add(&mut self, color: usize, face: FaceId, halfspaces: Vec<Halfspace>) -> Result<()> {
        if color >= self.colors {
            return Err(Error::invalid(format!("color {color} out of range for {} colors", self.colors)));
        }
        self.sets.entry((color, face)).or_default().push(halfspaces);
        Ok(())
    }

    /// The threshold cover `A^i_{e_j} = {x : x_j >= t}` on the vertex faces of a
    /// simplex for every color in `colors`; `t <= 1/k` makes each color a KKM cover.
    pub fn add_threshold(&mut self, polytope: &PolytopeModel, colors: &[usize], t: &Rat) -> Result<()> {
        let dim = polytope.ambient_dim();
        for f in polytope.faces().iter().filter(|f| f.dim == 0) {
            let j = f.vertex_ids[0];
            let coord = polytope.vertices()[j]
                .coords()
                .iter()
                .position(|c| c.is_one())
                .ok_or_else(|| Error::invalid("threshold covers need 0/1 vertices"))?;
            for &c in colors {
                self.add(c, f.id, vec![Halfspace::coordinate_at_least(dim, coord, t.clone())])?;
            }
        }
        Ok(())
    }

    /// Colors `0..n` each carrying the threshold cover with `t = 1/k`.
    pub fn gale_threshold(polytope: &PolytopeModel, n: usize) -> Result<Self> {
        let k = polytope.dim() + 1;
        let mut cover = PolyhedralCover::new(n);
        let t = Rat::new(1.into(), (k as i64).into());
        cover.add_threshold(polytope, &(0..n).collect::<Vec<_>>(), &t)?;
        Ok(cover)
    }

    /// On a product of simplices: `A^i_{v_T} = {x : x^t_{j_t} >= 1/m_t for all t}`
    /// for each listed color.
    pub fn product_threshold(polytope: &PolytopeModel, n: usize, colors: &[usize]) -> Result<Self> {
        let crate::polytope::PolytopeKind::Product { factors } = polytope.kind() else {
            return Err(Error::invalid("product threshold cover needs a product of simplices"));
        };
        let offsets = crate::polytope::factor_offsets(factors);
        let dim = polytope.ambient_dim();
        let mut cover = PolyhedralCover::new(n);
        for f in polytope.faces().iter().filter(|f| f.dim == 0) {
            let tuple = polytope.vertex_tuple(f.id).expect("vertex face of a product");
            let hs: Vec<Halfspace> = tuple
                .iter()
                .enumerate()
                .map(|(t, &j)| {
                    Halfspace::coordinate_at_least(dim, offsets[t] + j, Rat::new(1.into(), (factors[t] as i64).into()))
                })
                .collect();
            for &c in colors {
                cover.add(c, f.id, hs.clone())?;
            }
        }
        Ok(cover)
    }

    pub fn sets(&self) -> &BTreeMap<(usize, FaceId), Vec<Vec<Halfspace>>> {
        &self.sets
    }
}

impl CoverOracle for PolyhedralCover {
    fn colors(&self) -> usize {
        self.colors
    }

    fn contains(&self, color: usize, face: FaceId, x: &RatPoint) -> bool {
        self.sets
            .get(&(color, face))
            .is_some_and(|union| union.iter().any(|poly| poly.iter().all(|h| h.contains(x))))
    }
}

/// An oracle given by a closure.
pub struct FnCover<F> {
    colors: usize,
    openness: Openness,
    query: F,
}

impl<F> FnCover<F>
where
    F: Fn(usize, FaceId, &RatPoint) -> bool + Send + Sync,
{
    pub fn new(colors: usize, query: F) -> Self {
        FnCover { colors, openness: Openness::ClosedSets, query }
    }

    pub fn with_openness(mut self, openness: Openness) -> Self {
        self.openness = openness;
        self
    }
}

impl<F> CoverOracle for FnCover<F>
where
    F: Fn(usize, FaceId, &RatPoint) -> bool + Send + Sync,
{
    fn colors(&self) -> usize {
        self.colors
    }

    fn contains(&self, color: usize, face: FaceId, x: &RatPoint) -> bool {
        (self.query)(color, face, x)
    }

    fn openness(&self) -> Openness {
        self.openness
    }
}

/// A point `x`, colors `I`, and `σ = supp(x)` with `x ∉ A^i_τ` for all `i ∈ I`, `τ ⊆ σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationCertificate {
    pub point: RatPoint,
    pub subset: Vec<usize>,
    pub support: Support,
}

impl ViolationCertificate {
    /// Re-queries the oracle; `true` if the certificate holds.
    pub fn revalidate(&self, oracle: &dyn CoverOracle, polytope: &PolytopeModel) -> Result<bool> {
        if polytope.support(&self.point)? != self.support {
            return Ok(false);
        }
        let faces = polytope.faces_within(self.support);
        Ok(self.subset.iter().all(|&i| faces.iter().all(|&tau| !oracle.contains(i, tau, &self.point))))
    }
}

/// Colors `i` for which `x ∈ A^i_τ` for some `τ ⊆ supp(x)`.
pub fn labels_at(oracle: &dyn CoverOracle, polytope: &PolytopeModel, x: &RatPoint) -> Result<Vec<usize>> {
    let faces = polytope.faces_within(polytope.support(x)?);
    Ok((0..oracle.colors()).filter(|&i| faces.iter().any(|&tau| oracle.contains(i, tau, x))).collect())
}

/// Searches for a point and a set `I` of `n - m + 1` colors at which the
/// colors in `I` cover nothing. Samples `samples` random relative-interior
/// points of every face and of the polytope, plus every vertex. `None` is not
/// a proof that the family is a cover.
pub fn falsify_weak_cover(
    oracle: &dyn CoverOracle,
    polytope: &PolytopeModel,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<Option<ViolationCertificate>> {
    let n = oracle.colors();
    if m == 0 || m > n {
        return Err(Error::invalid(format!("weak cover parameter m={m} must lie in 1..={n}")));
    }
    let need = n - m + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: Vec<Vec<usize>> = polytope.faces().iter().map(|f| f.vertex_ids.clone()).collect();
    groups.push((0..polytope.vertices().len()).collect());
    for ids in groups {
        let pts: Vec<RatPoint> = ids.iter().map(|&i| polytope.vertices()[i].clone()).collect();
        for s in 0..samples.max(1) {
            let x = if s == 0 && pts.len() == 1 { pts[0].clone() } else { sample_relative_interior(&pts, &mut rng)? };
            let covered = labels_at(oracle, polytope, &x)?;
            let missing: Vec<usize> = (0..n).filter(|i| !covered.contains(i)).collect();
            // Some n-m+1 colors miss x exactly when at least that many colors miss it.
            if missing.len() >= need {
                let support = polytope.support(&x)?;
                return Ok(Some(ViolationCertificate { point: x, subset: missing[..need].to_vec(), support }));
            }
        }
    }
    Ok(None)
}

/// A convex combination of `points` with positive dyadic weights.
pub fn sample_relative_interior(points: &[RatPoint], rng: &mut impl Rng) -> Result<RatPoint> {
    let raw: Vec<i64> = points.iter().map(|_| rng.gen_range(1..=16)).collect();
    let total: i64 = raw.iter().sum();
    let weights: Vec<Rat> = raw.iter().map(|&w| Rat::new(w.into(), total.into())).collect();
    RatPoint::combination(&weights, points)
}
