//! Diagonal rational quadratic forms of rank 2 and 3.
//!
//! Local solvability is decided with Hilbert symbols, global solvability
//! with the classical local-global principle over the relevant places, and
//! witnesses are found by a Holzer-bounded search on the Legendre-normalized
//! form.

use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{self, factorize, is_perfect_square_i128, legendre_unchecked, squarefree_split, ArithError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("a diagonal form needs 2 or 3 coefficients, got {0}")]
    BadRank(usize),
    #[error("coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("integer overflow while normalizing {0:?}")]
    Overflow(Vec<i64>),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A place of Q: the real place or a prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Infinite,
    Finite(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Place::Infinite => s.serialize_str("inf"),
            Place::Finite(p) => s.serialize_u64(*p),
        }
    }
}

/// `a_1 x_1^2 + ... + a_n x_n^2` with `n` in {2, 3} and every `a_i != 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct DiagonalForm {
    coeffs: Vec<i64>,
}

impl DiagonalForm {
    pub fn new(coeffs: Vec<i64>) -> Result<Self, FormError> {
        if !(2..=3).contains(&coeffs.len()) {
            return Err(FormError::BadRank(coeffs.len()));
        }
        if coeffs.contains(&0) {
            return Err(FormError::ZeroCoefficient);
        }
        Ok(DiagonalForm { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// Value of the form at an integer vector.
    pub fn evaluate(&self, v: &[i64]) -> i128 {
        self.coeffs.iter().zip(v).map(|(&a, &x)| a as i128 * x as i128 * x as i128).sum()
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(i64::to_string).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

/// Local solvability of a form at each of its relevant places.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalProfile {
    pub form: DiagonalForm,
    pub entries: Vec<(Place, bool)>,
}

/// Turns a zero of a normalized form into a zero of the original one.
///
/// Every normalization step is a coordinate scaling, so the whole back-map
/// is `x_i = multipliers_i * X_i` followed by removal of the common factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BackMap {
    pub multipliers: Vec<u64>,
}

impl BackMap {
    pub fn apply(&self, zero: &[i64]) -> Result<Vec<i64>, FormError> {
        let scaled: Option<Vec<i64>> = zero
            .iter()
            .zip(&self.multipliers)
            .map(|(&x, &m)| i64::try_from(x as i128 * m as i128).ok())
            .collect();
        let scaled = scaled.ok_or_else(|| FormError::Overflow(zero.to_vec()))?;
        Ok(make_primitive(scaled))
    }
}

pub(crate) fn make_primitive(mut v: Vec<i64>) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
    v
}

/// Hilbert symbol `(a, b)_v`.
pub fn hilbert_symbol(a: i64, b: i64, v: Place) -> Result<i8, FormError> {
    if a == 0 || b == 0 {
        return Err(FormError::ZeroCoefficient);
    }
    if let Place::Finite(p) = v {
        if !arith::is_prime(p) {
            return Err(ArithError::NotPrime(p).into());
        }
    }
    Ok(hilbert(a as i128, b as i128, v))
}

fn split_power(mut n: i128, p: u64) -> (u32, i128) {
    let p = p as i128;
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    (k, n)
}

pub(crate) fn hilbert(a: i128, b: i128, v: Place) -> i8 {
    match v {
        Place::Infinite => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = split_power(a, 2);
            let (beta, w) = split_power(b, 2);
            let eps = |x: i128| u32::from(x.rem_euclid(4) == 3);
            let omega = |x: i128| u32::from(matches!(x.rem_euclid(8), 3 | 5));
            let exponent = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u);
            if exponent % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let (alpha, u) = split_power(a, p);
            let (beta, w) = split_power(b, p);
            let mut sign = 1i8;
            if (alpha * beta) % 2 == 1 && p % 4 == 3 {
                sign = -sign;
            }
            if beta % 2 == 1 {
                sign *= legendre_unchecked(u, p);
            }
            if alpha % 2 == 1 {
                sign *= legendre_unchecked(w, p);
            }
            sign
        }
    }
}

/// Whether a nonzero integer is a square in the completion of Q at `v`.
pub(crate) fn is_local_square(n: i128, v: Place) -> bool {
    match v {
        Place::Infinite => n > 0,
        Place::Finite(p) => {
            let (k, u) = split_power(n, p);
            if k % 2 == 1 {
                return false;
            }
            if p == 2 {
                u.rem_euclid(8) == 1
            } else {
                legendre_unchecked(u, p) == 1
            }
        }
    }
}

/// `{inf, 2}` together with the odd primes dividing some coefficient.
pub fn relevant_places(form: &DiagonalForm) -> Vec<Place> {
    let mut primes: Vec<u64> = vec![2];
    for &c in form.coeffs() {
        let f = factorize(c.unsigned_abs()).expect("coefficients are nonzero");
        primes.extend(f.primes());
    }
    primes.sort_unstable();
    primes.dedup();
    std::iter::once(Place::Infinite)
        .chain(primes.into_iter().map(Place::Finite))
        .collect()
}

/// Equivalent form with squarefree, pairwise coprime coefficients.
pub fn normalize(form: &DiagonalForm) -> Result<(DiagonalForm, BackMap), FormError> {
    let overflow = || FormError::Overflow(form.coeffs().to_vec());
    let mut coeffs: Vec<i128> = form.coeffs().iter().map(|&c| c as i128).collect();
    let mut multipliers = vec![1u128; coeffs.len()];
    loop {
        let content = coeffs.iter().fold(0i128, |g, &c| g.gcd(&c));
        coeffs.iter_mut().for_each(|c| *c /= content);

        let mut roots = Vec::with_capacity(coeffs.len());
        for c in coeffs.iter_mut() {
            let magnitude = u64::try_from(c.unsigned_abs()).map_err(|_| overflow())?;
            let (core, root) = squarefree_split(magnitude)?;
            *c = c.signum() * core as i128;
            roots.push(root as u128);
        }
        let common = roots.iter().fold(1u128, |l, &r| l.lcm(&r));
        for (m, r) in multipliers.iter_mut().zip(&roots) {
            *m = m.checked_mul(common / r).ok_or_else(overflow)?;
        }

        let shared = shared_prime(&coeffs)?;
        let Some((p, i, j)) = shared else { break };
        for (k, c) in coeffs.iter_mut().enumerate() {
            if k == i || k == j {
                *c /= p as i128;
            } else {
                *c = c.checked_mul(p as i128).ok_or_else(overflow)?;
                multipliers[k] = multipliers[k].checked_mul(p as u128).ok_or_else(overflow)?;
            }
        }
        let g = multipliers.iter().fold(0u128, |g, &m| g.gcd(&m));
        multipliers.iter_mut().for_each(|m| *m /= g);
    }
    let g = multipliers.iter().fold(0u128, |g, &m| g.gcd(&m));
    let coeffs: Option<Vec<i64>> = coeffs.iter().map(|&c| i64::try_from(c).ok()).collect();
    let multipliers: Option<Vec<u64>> = multipliers.iter().map(|&m| u64::try_from(m / g).ok()).collect();
    Ok((
        DiagonalForm::new(coeffs.ok_or_else(overflow)?)?,
        BackMap { multipliers: multipliers.ok_or_else(overflow)? },
    ))
}

/// First prime dividing two coefficients, with their indices.
fn shared_prime(coeffs: &[i128]) -> Result<Option<(u64, usize, usize)>, FormError> {
    for i in 0..coeffs.len() {
        for j in i + 1..coeffs.len() {
            let g = coeffs[i].gcd(&coeffs[j]) as u64;
            if g > 1 {
                let p = factorize(g)?.primes().next().expect("g > 1");
                return Ok(Some((p, i, j)));
            }
        }
    }
    Ok(None)
}

fn local_on_normalized(form: &DiagonalForm, v: Place) -> bool {
    let c: Vec<i128> = form.coeffs().iter().map(|&c| c as i128).collect();
    match c.as_slice() {
        [a, b] => is_local_square(-a * b, v),
        [a, b, c] => hilbert(-a * c, -b * c, v) == 1,
        _ => unreachable!("rank is checked at construction"),
    }
}

/// Whether the form has a nontrivial zero over the completion at `v`.
pub fn local_represents_zero(form: &DiagonalForm, v: Place) -> Result<bool, FormError> {
    let (normal, _) = normalize(form)?;
    Ok(local_on_normalized(&normal, v))
}

pub fn local_profile(form: &DiagonalForm) -> Result<LocalProfile, FormError> {
    let (normal, _) = normalize(form)?;
    let entries = relevant_places(form)
        .into_iter()
        .map(|v| (v, local_on_normalized(&normal, v)))
        .collect();
    Ok(LocalProfile { form: form.clone(), entries })
}

/// Whether the form has a nontrivial rational zero.
pub fn global_represents_zero(form: &DiagonalForm) -> Result<bool, FormError> {
    match form.coeffs() {
        &[a, b] => Ok(is_perfect_square_i128(-(a as i128) * b as i128)),
        _ => Ok(local_profile(form)?.entries.iter().all(|&(_, ok)| ok)),
    }
}

/// Relevant places where a rank-3 form has no local zero; always of even length.
pub fn failing_places(form: &DiagonalForm) -> Result<Vec<Place>, FormError> {
    if form.rank() != 3 {
        return Err(FormError::BadRank(form.rank()));
    }
    Ok(local_profile(form)?
        .entries
        .into_iter()
        .filter_map(|(v, ok)| (!ok).then_some(v))
        .collect())
}

/// A primitive zero with nonnegative entries, or `None` when the form is anisotropic.
pub fn find_isotropic_vector(form: &DiagonalForm) -> Result<Option<Vec<i64>>, FormError> {
    if !global_represents_zero(form)? {
        return Ok(None);
    }
    let (normal, back) = normalize(form)?;
    let zero = match *normal.coeffs() {
        [a, b] => {
            // squarefree, coprime and -ab a square leaves only a = -b = +-1
            if a != -b {
                return Err(FormError::Inconsistent(format!("rank-2 normal form {normal} is not split")));
            }
            vec![1, 1]
        }
        [a, b, c] => holzer_search(a, b, c)
            .ok_or_else(|| FormError::Inconsistent(format!("no zero of {normal} within Holzer bounds")))?,
        _ => unreachable!(),
    };
    let zero = back.apply(&zero)?;
    debug_assert_eq!(form.evaluate(&zero), 0);
    Ok(Some(zero))
}

/// Lexicographically first nonnegative nonzero solution within the Holzer box.
fn holzer_search(a: i64, b: i64, c: i64) -> Option<Vec<i64>> {
    let (a, b, c) = (a as i128, b as i128, c as i128);
    let bound = |u: i128, w: i128| (u * w).unsigned_abs().isqrt() as i128;
    let (x_max, y_max, z_max) = (bound(b, c), bound(a, c), bound(a, b));
    for x in 0..=x_max {
        for y in 0..=y_max {
            let rest = -(a * x * x + b * y * y);
            if rest % c != 0 {
                continue;
            }
            let zz = rest / c;
            if zz < 0 {
                continue;
            }
            let z = zz.unsigned_abs().isqrt() as i128;
            if z * z != zz || z > z_max || (x, y, z) == (0, 0, 0) {
                continue;
            }
            if x.gcd(&y).gcd(&z) == 1 {
                return Some(vec![x as i64, y as i64, z as i64]);
            }
        }
    }
    None
}

/// Brute force: a vector over `[0, m)` coprime to `m` on which the form vanishes mod `m`.
pub fn represents_zero_mod(form: &DiagonalForm, m: u64) -> Result<bool, FormError> {
    if m < 2 {
        return Err(FormError::ModulusTooSmall(m));
    }
    let coeffs: Vec<u64> = form.coeffs().iter().map(|&c| arith::rem_euclid(c as i128, m)).collect();
    let squares: Vec<u64> = (0..m).map(|x| arith::mul_mod(x, x, m)).collect();
    let term = |i: usize, x: u64| arith::mul_mod(coeffs[i], squares[x as usize], m);
    let found = match coeffs.len() {
        2 => (0..m).any(|x| {
            let gx = x.gcd(&m);
            (0..m).any(|y| gx.gcd(&y) == 1 && (term(0, x) + term(1, y)) % m == 0)
        }),
        _ => (0..m).any(|x| {
            let gx = x.gcd(&m);
            (0..m).any(|y| {
                let gxy = gx.gcd(&y);
                let partial = (term(0, x) + term(1, y)) % m;
                (0..m).any(|z| gxy.gcd(&z) == 1 && (partial + term(2, z)) % m == 0)
            })
        }),
    };
    Ok(found)
}

/// Rank-2 criterion for zeros modulo all but finitely many primes: `-ab` is a square.
pub fn almost_all_rank2_decide(a: i64, b: i64) -> Result<bool, FormError> {
    let form = DiagonalForm::new(vec![a, b])?;
    global_represents_zero(&form)
}
