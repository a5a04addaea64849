use num_bigint::BigInt;
use num_rational::BigRational;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rat = BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}
