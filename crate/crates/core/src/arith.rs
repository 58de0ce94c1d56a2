//! Exact integer and rational primitives.
//!
//! Everything here is deterministic: primality uses a fixed Miller-Rabin
//! witness set that is exact for 64-bit inputs, and factorization falls back
//! to Brent's variant of Pollard rho with a fixed sequence of seeds.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("expected a positive integer, got {0}")]
    NonPositive(i128),
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{a} is not invertible modulo {p}")]
    NotInvertible { a: i64, p: u64 },
    #[error("factorization of {got} does not describe {expected}")]
    FactorizationMismatch { expected: u64, got: u64 },
    #[error("element order does not divide the bound {bound}")]
    OrderBoundViolated { bound: u64 },
    #[error("no decomposition 2a^2 + b^2 + c^2 + 1 = {0}")]
    NoDecomposition(u64),
}

/// A positive integer together with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs sorted by prime.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// All positive divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let current = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..current {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed value into `[0, m)`.
pub(crate) fn rem_euclid(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m < 1 << 62 {
        let (mut old_r, mut r) = ((a % m) as i64, m as i64);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        return (old_r == 1).then(|| old_s.rem_euclid(m as i64) as u64);
    }
    let (g, x, _) = extended_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(rem_euclid(x, m))
}

/// Returns `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub(crate) fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Chinese remaindering of pairwise coprime congruences `x = r_i (mod m_i)`.
pub(crate) fn crt(residues: &[(u64, u64)]) -> (u64, u64) {
    let mut x: u128 = 0;
    let mut modulus: u128 = 1;
    for &(r, m) in residues {
        let inv = mod_inverse((modulus % m as u128) as u64, m).expect("moduli must be coprime");
        let diff = (r as i128 - (x % m as u128) as i128).rem_euclid(m as i128) as u128;
        let k = diff * inv as u128 % m as u128;
        x += modulus * k;
        modulus *= m as u128;
    }
    (x as u64, modulus as u64)
}

const MR_WITNESSES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Deterministic primality test, exact on the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &MR_WITNESSES {
        let a = w % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Prime factorization: trial division up to 10^6, then Pollard rho (Brent).
pub fn factorize(n: u64) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::NonPositive(0));
    }
    let mut factors = Vec::new();
    let mut m = n;
    let mut d = 2u64;
    while d <= TRIAL_LIMIT && d * d <= m {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        let mut large = Vec::new();
        split_large(m, &mut large);
        large.sort_unstable();
        for p in large {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    Ok(Factorization { value: n, factors })
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let root = n.sqrt();
    if root * root == n {
        split_large(root, out);
        split_large(root, out);
        return;
    }
    let d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

fn pollard_brent(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Exponent `k` with `l^k` exactly dividing `n`.
pub fn valuation(n: i128, l: u64) -> Result<u32, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroValuation);
    }
    if !is_prime(l) {
        return Err(ArithError::NotPrime(l));
    }
    let l = l as u128;
    let mut m = n.unsigned_abs();
    let mut k = 0;
    while m % l == 0 {
        m /= l;
        k += 1;
    }
    Ok(k)
}

fn require_odd_prime(p: u64) -> Result<(), ArithError> {
    if p == 2 || !is_prime(p) {
        return Err(ArithError::NotOddPrime(p));
    }
    Ok(())
}

pub(crate) fn legendre_unchecked(a: i128, p: u64) -> i8 {
    let a = rem_euclid(a, p);
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Legendre symbol `(a / p)` for an odd prime `p`.
pub fn legendre_symbol(a: i64, p: u64) -> Result<i8, ArithError> {
    require_odd_prime(p)?;
    Ok(legendre_unchecked(a as i128, p))
}

/// Square root of `a` modulo an odd prime, the smaller of the two roots.
pub fn sqrt_mod_p(a: i64, p: u64) -> Result<Option<u64>, ArithError> {
    require_odd_prime(p)?;
    let a = rem_euclid(a as i128, p);
    if a == 0 {
        return Ok(Some(0));
    }
    if legendre_unchecked(a as i128, p) != 1 {
        return Ok(None);
    }
    let r = tonelli_shanks(a, p);
    Ok(Some(r.min(p - r)))
}

fn tonelli_shanks(a: u64, p: u64) -> u64 {
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    if s == 1 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let mut z = 2u64;
    while legendre_unchecked(z as i128, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Order of an element in a finite group, given a multiple of that order.
///
/// `scale(k)` must return `k` times the element and `is_identity` recognise
/// the neutral element. Prime factors are stripped from the bound one at a
/// time while the scaled element stays trivial.
pub fn generic_element_order<G>(
    bound: &Factorization,
    scale: impl Fn(u64) -> G,
    is_identity: impl Fn(&G) -> bool,
) -> Result<u64, ArithError> {
    let mut order = bound.value();
    if !is_identity(&scale(order)) {
        return Err(ArithError::OrderBoundViolated { bound: order });
    }
    for &(p, e) in bound.factors() {
        for _ in 0..e {
            if is_identity(&scale(order / p)) {
                order /= p;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Least `k >= 1` with `a^k = 1 (mod p)`.
pub fn multiplicative_order(a: i64, p: u64, p_minus_one: &Factorization) -> Result<u64, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    if p_minus_one.value() != p - 1 {
        return Err(ArithError::FactorizationMismatch { expected: p - 1, got: p_minus_one.value() });
    }
    let a = rem_euclid(a as i128, p);
    if a == 0 {
        return Err(ArithError::NotInvertible { a: 0, p });
    }
    generic_element_order(p_minus_one, |k| pow_mod(a, k, p), |&x| x == 1)
}

/// Nonnegative rational square root, when one exists.
pub fn rational_square_root(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    if q.is_zero() {
        return Some(q.clone());
    }
    let num = q.numer().sqrt();
    let den = q.denom().sqrt();
    if &(&num * &num) == q.numer() && &(&den * &den) == q.denom() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

/// Integer square root when `n` is a perfect square.
pub(crate) fn exact_sqrt(n: u64) -> Option<u64> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

pub(crate) fn is_perfect_square_i128(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = BigInt::from(n).sqrt();
    r.clone() * r == BigInt::from(n)
}

/// `n = a^2 + b^2 + c^2` with `a >= b >= c >= 0`, largest `a` first.
pub fn three_squares(n: u64) -> Option<(u64, u64, u64)> {
    let top = n.sqrt();
    for a in (0..=top).rev() {
        let rest = n - a * a;
        // a >= b >= c forces 3 a^2 >= n
        if 3 * a * a < n {
            break;
        }
        let b_top = rest.sqrt().min(a);
        for b in (0..=b_top).rev() {
            if 2 * b * b < rest {
                break;
            }
            if let Some(c) = exact_sqrt(rest - b * b) {
                if c <= b {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// `(a, b, c)` with `2a^2 + b^2 + c^2 + 1 = 2k` and `b >= c`.
///
/// `a` is taken as large as possible, then `b`; such a decomposition exists
/// for every `k >= 1` because every odd number has the form `2a^2 + b^2 + c^2`.
pub fn gauss_two_k(k: u64) -> Result<(u64, u64, u64), ArithError> {
    if k == 0 {
        return Err(ArithError::NonPositive(0));
    }
    let n = 2 * k - 1;
    for a in (0..=(n / 2).sqrt()).rev() {
        let rest = n - 2 * a * a;
        for b in (0..=rest.sqrt()).rev() {
            if 2 * b * b < rest {
                break;
            }
            if let Some(c) = exact_sqrt(rest - b * b) {
                return Ok((a, b, c));
            }
        }
    }
    Err(ArithError::NoDecomposition(2 * k))
}

/// Splits `n = core * root^2` with `core` squarefree.
pub(crate) fn squarefree_split(n: u64) -> Result<(u64, u64), ArithError> {
    let f = factorize(n)?;
    let mut core = 1u64;
    let mut root = 1u64;
    for &(p, e) in f.factors() {
        if e % 2 == 1 {
            core *= p;
        }
        root *= p.pow(e / 2);
    }
    Ok((core, root))
}
