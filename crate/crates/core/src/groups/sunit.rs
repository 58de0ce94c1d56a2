use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::GroupError;
use crate::arith;

/// A finite set of primes S; the group is the S-units of Q.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SUnitContext {
    primes: Vec<u64>,
}

impl SUnitContext {
    pub fn new(mut primes: Vec<u64>) -> Result<Self, GroupError> {
        if let Some(&p) = primes.iter().find(|&&p| !arith::is_prime(p)) {
            return Err(GroupError::InvalidContext(format!("{p} is not prime")));
        }
        primes.sort_unstable();
        let len = primes.len();
        primes.dedup();
        if primes.len() != len {
            return Err(GroupError::InvalidContext("repeated prime in S".into()));
        }
        Ok(SUnitContext { primes })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn rank(&self) -> usize {
        self.primes.len()
    }
}

/// `sign * prod p_i^{e_i}` over the primes of the context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SUnit {
    pub sign: i8,
    pub exponents: Vec<i64>,
}

impl SUnit {
    pub fn one(ctx: &SUnitContext) -> Self {
        SUnit { sign: 1, exponents: vec![0; ctx.rank()] }
    }

    pub fn is_one(&self) -> bool {
        self.sign == 1 && self.exponents.iter().all(|&e| e == 0)
    }

    pub fn is_torsion(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &SUnit) -> SUnit {
        SUnit {
            sign: self.sign * other.sign,
            exponents: self.exponents.iter().zip(&other.exponents).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn inverse(&self) -> SUnit {
        SUnit { sign: self.sign, exponents: self.exponents.iter().map(|e| -e).collect() }
    }

    pub fn pow(&self, n: i64) -> SUnit {
        let sign = if n % 2 == 0 { 1 } else { self.sign };
        SUnit { sign, exponents: self.exponents.iter().map(|e| e * n).collect() }
    }
}

/// Canonical S-unit for a nonzero rational supported on S.
pub fn su_make(ctx: &SUnitContext, q: &BigRational) -> Result<SUnit, GroupError> {
    if q.is_zero() {
        return Err(GroupError::NotAnSUnit(q.to_string()));
    }
    let sign = if q.is_negative() { -1 } else { 1 };
    let mut num = q.numer().abs();
    let mut den = q.denom().clone();
    let mut exponents = Vec::with_capacity(ctx.rank());
    for &p in ctx.primes() {
        let p = BigInt::from(p);
        let mut e = 0i64;
        while (&num % &p).is_zero() {
            num /= &p;
            e += 1;
        }
        while (&den % &p).is_zero() {
            den /= &p;
            e -= 1;
        }
        exponents.push(e);
    }
    if !num.is_one() || !den.is_one() {
        return Err(GroupError::NotAnSUnit(q.to_string()));
    }
    Ok(SUnit { sign, exponents })
}

/// The rational number an S-unit stands for.
pub fn su_value(ctx: &SUnitContext, u: &SUnit) -> BigRational {
    let mut num = BigInt::from(u.sign);
    let mut den = BigInt::one();
    for (&p, &e) in ctx.primes().iter().zip(&u.exponents) {
        let pe = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
        if e >= 0 {
            num *= pe;
        } else {
            den *= pe;
        }
    }
    BigRational::new(num, den)
}

/// Residue of an S-unit modulo a prime outside S.
pub(crate) fn su_residue(ctx: &SUnitContext, u: &SUnit, p: u64) -> u64 {
    let mut acc = if u.sign < 0 { p - 1 } else { 1 };
    for (&q, &e) in ctx.primes().iter().zip(&u.exponents) {
        let base = if e >= 0 { q % p } else { arith::mod_inverse(q % p, p).expect("p not in S") };
        acc = arith::mul_mod(acc, arith::pow_mod(base, e.unsigned_abs(), p), p);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn make_examples() {
        let s2 = SUnitContext::new(vec![2]).unwrap();
        assert_eq!(su_make(&s2, &q(1, 16)).unwrap(), SUnit { sign: 1, exponents: vec![-4] });
        let s23 = SUnitContext::new(vec![3, 2]).unwrap();
        assert_eq!(su_make(&s23, &q(-6, 1)).unwrap(), SUnit { sign: -1, exponents: vec![1, 1] });
        assert!(matches!(su_make(&s2, &q(3, 1)), Err(GroupError::NotAnSUnit(_))));
        assert!(matches!(su_make(&s2, &q(0, 1)), Err(GroupError::NotAnSUnit(_))));
    }

    #[test]
    fn value_round_trip() {
        let ctx = SUnitContext::new(vec![2, 3, 5]).unwrap();
        for (n, d) in [(1, 1), (-1, 1), (12, 5), (-1, 360), (125, 8)] {
            let u = su_make(&ctx, &q(n, d)).unwrap();
            assert_eq!(su_value(&ctx, &u), q(n, d));
        }
    }

    #[test]
    fn context_validation() {
        assert!(SUnitContext::new(vec![2, 4]).is_err());
        assert!(SUnitContext::new(vec![3, 3]).is_err());
        assert_eq!(SUnitContext::new(vec![5, 2]).unwrap().primes(), &[2, 5]);
    }
}
