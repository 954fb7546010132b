use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Reduced fraction with a positive denominator over arbitrary-precision integers.
///
/// Displays and serializes as `"num/den"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(domain!("zero denominator"));
        }
        Ok(ExactRational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn recip(&self) -> Self {
        ExactRational(self.0.recip())
    }

    pub fn pow(&self, exp: i32) -> Self {
        ExactRational(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Nearest `f64`, correct even when numerator and denominator overflow `f64`.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        ExactRational(r)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|e| domain!("bad integer {t:?}: {e}"))
        };
        match s.split_once('/') {
            Some((n, d)) => ExactRational::new(parse(n)?, parse(d)?),
            None => Ok(ExactRational::from_integer(parse(s)?)),
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Sum for ExactRational {
    fn sum<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::zero(), |a, b| a + b)
    }
}

impl Product for ExactRational {
    fn product<I: Iterator<Item = ExactRational>>(iter: I) -> Self {
        iter.fold(ExactRational::one(), |a, b| a * b)
    }
}

/// Product of many machine integers by balanced splitting.
pub(crate) fn product_tree(values: &[BigUint]) -> BigUint {
    match values.len() {
        0 => BigUint::one(),
        1 => values[0].clone(),
        n if n > 64 => {
            let (a, b) = values.split_at(n / 2);
            let (x, y) = rayon::join(|| product_tree(a), || product_tree(b));
            x * y
        }
        n => {
            let (a, b) = values.split_at(n / 2);
            product_tree(a) * product_tree(b)
        }
    }
}

/// Exact `Σ 1/d` for positive machine-sized denominators.
///
/// The sum is accumulated over the least common multiple of the
/// denominators, so only one big gcd is performed at the end.
pub fn sum_unit_fractions(denominators: &[u64]) -> Result<ExactRational> {
    if denominators.contains(&0) {
        return Err(domain!("zero denominator in unit-fraction sum"));
    }
    let mut distinct = denominators.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut max_exp: std::collections::BTreeMap<u64, u32> = Default::default();
    for &d in &distinct {
        for (p, e) in super::factorize(d) {
            let slot = max_exp.entry(p).or_insert(0);
            *slot = (*slot).max(e);
        }
    }
    let powers: Vec<BigUint> = max_exp
        .iter()
        .map(|(&p, &e)| BigUint::from(p).pow(e))
        .collect();
    let common = product_tree(&powers);
    let numer: BigUint = denominators
        .par_chunks(256)
        .map(|chunk| {
            chunk
                .iter()
                .fold(BigUint::zero(), |acc, &d| acc + &common / d)
        })
        .reduce(BigUint::zero, |a, b| a + b);
    Ok(ExactRational(BigRational::new(
        BigInt::from(numer),
        BigInt::from(common),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d).unwrap()
    }

    #[test]
    fn reduces_and_normalizes_sign() {
        let x = r(6, -4);
        assert_eq!(x.to_string(), "-3/2");
        assert_eq!(r(4, 2).to_string(), "2/1");
        assert!(ExactRational::new(1, 0).is_err());
    }

    #[test]
    fn parses_display_form() {
        assert_eq!("9/4".parse::<ExactRational>().unwrap(), r(9, 4));
        assert_eq!("3".parse::<ExactRational>().unwrap(), r(3, 1));
        assert!("1/0".parse::<ExactRational>().is_err());
        assert!("x/2".parse::<ExactRational>().is_err());
    }

    #[test]
    fn unit_fraction_sum_small() {
        let s = sum_unit_fractions(&[1, 2, 3, 4, 6]).unwrap();
        assert_eq!(s, r(9, 4));
        assert_eq!(sum_unit_fractions(&[]).unwrap(), ExactRational::zero());
        assert!(sum_unit_fractions(&[0]).is_err());
    }

    #[test]
    fn unit_fraction_sum_matches_naive_addition() {
        let ds: Vec<u64> = (1..=300).collect();
        let naive: ExactRational = ds.iter().map(|&d| r(1, d as i64)).sum();
        assert_eq!(sum_unit_fractions(&ds).unwrap(), naive);
    }

    #[test]
    fn to_f64_handles_huge_parts() {
        let big = BigInt::from(10u32).pow(400);
        let x = ExactRational::new(&big * 3, &big * 2).unwrap();
        assert_eq!(x.to_f64(), 1.5);
        let y = ExactRational::new(BigInt::from(10u32).pow(400) + 1, BigInt::from(10u32).pow(399)).unwrap();
        assert!((y.to_f64() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn serializes_as_string() {
        assert_eq!(serde_json::to_string(&r(3, 7)).unwrap(), "\"3/7\"");
    }
}
