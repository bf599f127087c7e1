use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use super::AlgebraError;

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Valuation of a p-integral rational; `None` for zero.
pub fn valuation(x: &BigRational, p: u64) -> Option<u32> {
    if x.is_zero() {
        None
    } else {
        Some(int_valuation(x.numer(), p))
    }
}

pub fn is_p_integral(x: &BigRational, p: u64) -> bool {
    x.is_zero() || int_valuation(x.denom(), p) == 0
}

/// Reduce a p-integral rational to its residue in `0..p^e`.
pub fn residue(x: &BigRational, p: u64, e: u32) -> BigInt {
    let modulus = BigInt::from(p).pow(e);
    if e == 0 {
        return BigInt::zero();
    }
    let num = x.numer().mod_floor(&modulus);
    let den = x.denom().mod_floor(&modulus);
    let inv = mod_inverse(&den, &modulus).expect("denominator is a unit mod p^e");
    (num * inv).mod_floor(&modulus)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else if (-&g.gcd).is_one() {
        Some((-g.x).mod_floor(m))
    } else {
        None
    }
}

pub fn pow_p(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// An element of the p-local integers: a reduced fraction whose denominator is prime to p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalScalar {
    value: BigRational,
    prime: u64,
}

impl LocalScalar {
    pub fn new(numer: i64, denom: i64, prime: u64) -> Result<Self, AlgebraError> {
        if denom == 0 {
            return Err(AlgebraError::ZeroDenominator);
        }
        Self::from_rational(BigRational::new(numer.into(), denom.into()), prime)
    }

    pub fn from_int(n: i64, prime: u64) -> Self {
        LocalScalar { value: BigRational::from_integer(n.into()), prime }
    }

    pub fn from_rational(value: BigRational, prime: u64) -> Result<Self, AlgebraError> {
        if !is_p_integral(&value, prime) {
            return Err(AlgebraError::NotLocal { value: value.to_string(), prime });
        }
        Ok(LocalScalar { value, prime })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn numerator(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.value.denom()
    }

    pub fn valuation(&self) -> Option<u32> {
        valuation(&self.value, self.prime)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_unit() {
            Some(LocalScalar { value: self.value.recip(), prime: self.prime })
        } else {
            None
        }
    }
}

impl fmt::Display for LocalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_p_in_denominator() {
        assert!(LocalScalar::new(1, 4, 2).is_err());
        assert!(LocalScalar::new(1, 4, 3).is_ok());
    }

    #[test]
    fn valuation_of_twelve() {
        let x = LocalScalar::from_int(12, 2);
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(LocalScalar::from_int(12, 3).valuation(), Some(1));
        assert!(LocalScalar::from_int(3, 2).is_unit());
    }

    #[test]
    fn residue_of_fraction() {
        let x = BigRational::new(1.into(), 3.into());
        // 3 * 3 = 9 = 1 mod 8
        assert_eq!(residue(&x, 2, 3), BigInt::from(3));
    }
}
