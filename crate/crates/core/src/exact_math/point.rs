use std::fmt;
use std::ops::Index;

use num_traits::Zero;

use super::rat::{int, Rat};
use crate::error::{Error, Result};

/// A point of the ambient space with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatPoint {
    coords: Vec<Rat>,
}

impl RatPoint {
    pub fn new(coords: Vec<Rat>) -> Self {
        RatPoint { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        RatPoint { coords: vec![Rat::zero(); dim] }
    }

    /// The `i`-th standard basis vector of `R^dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut p = Self::zeros(dim);
        p.coords[i] = int(1);
        p
    }

    pub fn from_ints(values: &[i64]) -> Self {
        RatPoint { coords: values.iter().map(|&v| int(v)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Rat> {
        self.coords
    }

    pub(crate) fn check_dim(&self, other: &RatPoint) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &RatPoint) -> Result<RatPoint> {
        self.check_dim(other)?;
        Ok(RatPoint::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &RatPoint) -> Result<RatPoint> {
        self.check_dim(other)?;
        Ok(RatPoint::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, factor: &Rat) -> RatPoint {
        RatPoint::new(self.coords.iter().map(|c| c * factor).collect())
    }

    pub fn dot(&self, other: &RatPoint) -> Result<Rat> {
        self.check_dim(other)?;
        Ok(self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum())
    }

    pub fn squared_distance(&self, other: &RatPoint) -> Result<Rat> {
        self.check_dim(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| {
                let d = a - b;
                &d * &d
            })
            .sum())
    }

    /// Uniform average of `points` (the true barycenter, not the iterated one).
    pub fn centroid(points: &[RatPoint]) -> Result<RatPoint> {
        let first = points.first().ok_or(Error::EmptyInput("centroid of no points"))?;
        let mut acc = RatPoint::zeros(first.dim());
        for p in points {
            acc = acc.add(p)?;
        }
        Ok(acc.scale(&Rat::new(1.into(), (points.len() as i64).into())))
    }

    /// Weighted sum `Σ w_i p_i`.
    pub fn combination(weights: &[Rat], points: &[RatPoint]) -> Result<RatPoint> {
        let first = points.first().ok_or(Error::EmptyInput("combination of no points"))?;
        if weights.len() != points.len() {
            return Err(Error::DimensionMismatch { expected: points.len(), found: weights.len() });
        }
        let mut acc = RatPoint::zeros(first.dim());
        for (w, p) in weights.iter().zip(points) {
            acc = acc.add(&p.scale(w))?;
        }
        Ok(acc)
    }
}

impl Index<usize> for RatPoint {
    type Output = Rat;

    fn index(&self, i: usize) -> &Rat {
        &self.coords[i]
    }
}

impl fmt::Display for RatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Exact midpoint `(a + b) / 2`.
pub fn midpoint(a: &RatPoint, b: &RatPoint) -> Result<RatPoint> {
    let half = Rat::new(1.into(), 2.into());
    Ok(a.add(b)?.scale(&half))
}

/// Left fold of midpoints: `b(v_1, ..., v_{m+1}) = b(b(v_1, ..., v_m), v_{m+1})`.
///
/// A single point is its own barycenter.
pub fn iterated_barycenter(points: &[RatPoint]) -> Result<RatPoint> {
    let (first, rest) = points.split_first().ok_or(Error::EmptyInput("iterated barycenter"))?;
    rest.iter().try_fold(first.clone(), |acc, p| midpoint(&acc, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_math::rat;

    fn pt(c: &[(i64, i64)]) -> RatPoint {
        RatPoint::new(c.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn midpoint_examples() {
        assert_eq!(midpoint(&pt(&[(0, 1)]), &pt(&[(1, 1)])).unwrap(), pt(&[(1, 2)]));
        assert_eq!(
            midpoint(&pt(&[(0, 1), (0, 1)]), &pt(&[(0, 1), (0, 1)])).unwrap(),
            pt(&[(0, 1), (0, 1)])
        );
        assert_eq!(
            midpoint(&pt(&[(1, 2), (1, 4)]), &pt(&[(1, 4), (3, 4)])).unwrap(),
            pt(&[(3, 8), (1, 2)])
        );
    }

    #[test]
    fn midpoint_dimension_mismatch() {
        let err = midpoint(&pt(&[(0, 1)]), &pt(&[(0, 1), (1, 1)])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 1, found: 2 }));
    }

    #[test]
    fn iterated_barycenter_examples() {
        assert_eq!(
            iterated_barycenter(&[pt(&[(0, 1)]), pt(&[(1, 1)])]).unwrap(),
            pt(&[(1, 2)])
        );
        assert_eq!(
            iterated_barycenter(&[pt(&[(0, 1)]), pt(&[(1, 1)]), pt(&[(1, 1)])]).unwrap(),
            pt(&[(3, 4)])
        );
        assert_eq!(
            iterated_barycenter(&[
                RatPoint::from_ints(&[0, 0]),
                RatPoint::from_ints(&[1, 0]),
                RatPoint::from_ints(&[0, 1])
            ])
            .unwrap(),
            pt(&[(1, 4), (1, 2)])
        );
        assert!(matches!(iterated_barycenter(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn iterated_barycenter_weights() {
        // v_1 carries 1/2^{m-1}, v_i (i >= 2) carries 1/2^{m-i+1}.
        let pts: Vec<_> = (0..4).map(|i| RatPoint::unit(4, i)).collect();
        let b = iterated_barycenter(&pts).unwrap();
        assert_eq!(b, pt(&[(1, 8), (1, 8), (1, 4), (1, 2)]));
    }

    #[test]
    fn centroid_is_uniform() {
        let pts: Vec<_> = (0..3).map(|i| RatPoint::unit(3, i)).collect();
        assert_eq!(RatPoint::centroid(&pts).unwrap(), pt(&[(1, 3), (1, 3), (1, 3)]));
    }
}
