//! Short Weierstrass curves `y^2 = x^3 + Ax + B` over Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::GroupError;
use crate::arith;

/// Largest prime at which point counts are computed by enumeration.
pub const POINT_COUNT_CAP: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Curve {
    a: BigInt,
    b: BigInt,
}

impl Curve {
    pub fn new(a: BigInt, b: BigInt) -> Result<Self, GroupError> {
        let curve = Curve { a, b };
        if curve.discriminant().is_zero() {
            return Err(GroupError::InvalidContext("singular curve (zero discriminant)".into()));
        }
        Ok(curve)
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// `-16 (4A^3 + 27B^2)`
    pub fn discriminant(&self) -> BigInt {
        BigInt::from(-16) * self.nagell_lutz_bound()
    }

    /// `4A^3 + 27B^2`; `y^2` divides it for integral torsion points.
    pub(crate) fn nagell_lutz_bound(&self) -> BigInt {
        BigInt::from(4) * &self.a * &self.a * &self.a + BigInt::from(27) * &self.b * &self.b
    }

    pub fn contains(&self, x: &BigRational, y: &BigRational) -> bool {
        let a = BigRational::from_integer(self.a.clone());
        let b = BigRational::from_integer(self.b.clone());
        y * y == x * x * x + a * x + b
    }

    /// Good reduction in the sense used here: `p > 3` and `p` does not divide the discriminant.
    pub fn is_good_prime(&self, p: u64) -> bool {
        p > 3 && arith::is_prime(p) && !(self.discriminant() % BigInt::from(p)).is_zero()
    }

    pub(crate) fn coeffs_mod(&self, p: u64) -> (u64, u64) {
        let m = BigInt::from(p);
        let a = self.a.mod_floor(&m).to_u64().expect("reduced below p");
        let b = self.b.mod_floor(&m).to_u64().expect("reduced below p");
        (a, b)
    }

    /// Whether the curve has complex multiplication by an order of Q(i) or Q(sqrt -3).
    pub fn has_obvious_cm(&self) -> bool {
        self.a.is_zero() || self.b.is_zero()
    }
}

/// A rational point, stored as a primitive projective triple `(X : Y : Z)` with `Z > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Finite { x: BigInt, y: BigInt, z: BigInt },
}

impl CurvePoint {
    pub fn from_affine(x: &BigRational, y: &BigRational) -> CurvePoint {
        let z = x.denom().lcm(y.denom());
        let big_x = x.numer() * (&z / x.denom());
        let big_y = y.numer() * (&z / y.denom());
        let g = big_x.gcd(&big_y).gcd(&z);
        CurvePoint::Finite { x: big_x / &g, y: big_y / &g, z: z / g }
    }

    pub fn affine(&self) -> Option<(BigRational, BigRational)> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Finite { x, y, z } => Some((
                BigRational::new(x.clone(), z.clone()),
                BigRational::new(y.clone(), z.clone()),
            )),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }
}

pub(crate) fn on_curve(curve: &Curve, p: &CurvePoint) -> bool {
    match p {
        CurvePoint::Infinity => true,
        CurvePoint::Finite { x, y, z } => {
            // Y^2 Z = X^3 + A X Z^2 + B Z^3
            y * y * z == x * x * x + curve.a() * x * z * z + curve.b() * z * z * z
        }
    }
}

pub(crate) fn negate(p: &CurvePoint) -> CurvePoint {
    match p {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Finite { x, y, z } => CurvePoint::Finite { x: x.clone(), y: -y, z: z.clone() },
    }
}

/// Chord-tangent addition.
pub(crate) fn add(curve: &Curve, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
    let (Some((x1, y1)), Some((x2, y2))) = (p.affine(), q.affine()) else {
        return if p.is_infinity() { q.clone() } else { p.clone() };
    };
    let lambda = if x1 == x2 {
        if y1 != y2 || y1.is_zero() {
            return CurvePoint::Infinity;
        }
        let three = BigRational::from_integer(3.into());
        let two = BigRational::from_integer(2.into());
        (three * &x1 * &x1 + BigRational::from_integer(curve.a().clone())) / (two * &y1)
    } else {
        (&y2 - &y1) / (&x2 - &x1)
    };
    let x3 = &lambda * &lambda - &x1 - &x2;
    let y3 = lambda * (&x1 - &x3) - y1;
    CurvePoint::from_affine(&x3, &y3)
}

pub(crate) fn scalar_mul(curve: &Curve, n: i64, p: &CurvePoint) -> CurvePoint {
    let mut base = if n < 0 { negate(p) } else { p.clone() };
    let mut k = n.unsigned_abs();
    let mut acc = CurvePoint::Infinity;
    while k > 0 {
        if k & 1 == 1 {
            acc = add(curve, &acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = add(curve, &base, &base);
        }
    }
    acc
}

/// Smallest `n <= 16` with `nP = O`, if any.
pub(crate) fn small_order(curve: &Curve, p: &CurvePoint) -> Option<u64> {
    let mut acc = p.clone();
    for n in 1..=16u64 {
        if acc.is_infinity() {
            return Some(n);
        }
        acc = add(curve, &acc, p);
    }
    None
}

/// Table of quadratic residues mod `p` (index 0 is marked as a square).
pub(crate) fn square_table(p: u64) -> Vec<bool> {
    let mut table = vec![false; p as usize];
    for x in 0..p.div_ceil(2) {
        table[(x * x % p) as usize] = true;
    }
    table
}

/// `#E(F_p) = p + 1 + sum_x (x^3 + Ax + B | p)`.
pub fn point_count_mod_p(curve: &Curve, p: u64) -> Result<u64, GroupError> {
    if p > POINT_COUNT_CAP {
        return Err(GroupError::PrimeTooLarge { p, cap: POINT_COUNT_CAP });
    }
    if !curve.is_good_prime(p) {
        return Err(GroupError::BadPlace(p));
    }
    let (a, b) = curve.coeffs_mod(p);
    let squares = square_table(p);
    let mut count = p as i64 + 1;
    for x in 0..p {
        let rhs = (arith::mul_mod(arith::mul_mod(x, x, p), x, p) + arith::mul_mod(a, x, p) + b) % p;
        if rhs != 0 {
            count += if squares[rhs as usize] { 1 } else { -1 };
        }
    }
    Ok(count as u64)
}

/// Integral points of finite order, by Nagell-Lutz candidate enumeration.
pub(crate) fn nagell_lutz_torsion(curve: &Curve) -> Result<Vec<(CurvePoint, u64)>, GroupError> {
    let too_large = || GroupError::TooLarge("Nagell-Lutz bound exceeds 64 bits".into());
    let bound = curve.nagell_lutz_bound().abs().to_u64().ok_or_else(too_large)?;
    let a = curve.a().to_i128().ok_or_else(too_large)?;
    let b = curve.b().to_i128().ok_or_else(too_large)?;

    let mut y_root = 1u64;
    for &(p, e) in arith::factorize(bound)?.factors() {
        y_root *= p.pow(e / 2);
    }
    let mut ys = vec![0u64];
    ys.extend(arith::factorize(y_root)?.divisors());

    let mut found = vec![(CurvePoint::Infinity, 1)];
    for y in ys {
        let constant = b - (y as i128) * (y as i128);
        for x in integer_roots_depressed_cubic(a, constant)? {
            let signs: &[i128] = if y == 0 { &[1] } else { &[1, -1] };
            for &s in signs {
                let point = CurvePoint::Finite { x: x.into(), y: (s * y as i128).into(), z: BigInt::one() };
                if let Some(order) = small_order(curve, &point) {
                    found.push((point, order));
                }
            }
        }
    }
    Ok(found)
}

/// Integer roots of `x^3 + a x + c`.
fn integer_roots_depressed_cubic(a: i128, c: i128) -> Result<Vec<i128>, GroupError> {
    let f = |x: i128| x * x * x + a * x + c;
    let mut roots = Vec::new();
    if c == 0 {
        roots.push(0);
        if a < 0 {
            let r = (-a).unsigned_abs().isqrt() as i128;
            if r * r == -a {
                roots.extend([r, -r]);
            }
        }
    } else {
        let magnitude = u64::try_from(c.unsigned_abs())
            .map_err(|_| GroupError::TooLarge("cubic constant exceeds 64 bits".into()))?;
        for d in arith::factorize(magnitude)?.divisors() {
            for x in [d as i128, -(d as i128)] {
                if f(x) == 0 {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort_unstable();
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(a: i64, b: i64) -> Curve {
        Curve::new(a.into(), b.into()).unwrap()
    }

    fn pt(x: i64, y: i64) -> CurvePoint {
        CurvePoint::Finite { x: x.into(), y: y.into(), z: BigInt::one() }
    }

    fn count_by_enumeration(a: i64, b: i64, p: i64) -> u64 {
        let mut n = 1;
        for x in 0..p {
            for y in 0..p {
                if (y * y - x * x * x - a * x - b).rem_euclid(p) == 0 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn doubling_on_37a() {
        let e = curve(-16, 16);
        assert_eq!(add(&e, &pt(0, 4), &pt(0, 4)), pt(4, 4));
        assert_eq!(scalar_mul(&e, 2, &pt(0, 4)), pt(4, 4));
        assert!(add(&e, &pt(0, 4), &negate(&pt(0, 4))).is_infinity());
        assert!(scalar_mul(&e, 0, &pt(0, 4)).is_infinity());
        assert_eq!(scalar_mul(&e, -2, &pt(0, 4)), pt(4, -4));
    }

    #[test]
    fn multiples_stay_on_curve_and_primitive() {
        let e = curve(-16, 16);
        let p = pt(0, 4);
        for n in -12..=12 {
            let q = scalar_mul(&e, n, &p);
            assert!(on_curve(&e, &q), "{n}P off curve");
            if let CurvePoint::Finite { x, y, z } = &q {
                assert!(z.is_positive());
                assert!(x.gcd(y).gcd(z).is_one());
                let (ax, ay) = q.affine().unwrap();
                assert_eq!(CurvePoint::from_affine(&ax, &ay), q);
            }
        }
    }

    #[test]
    fn point_count_examples() {
        assert_eq!(point_count_mod_p(&curve(0, 1), 5), Ok(6));
        assert_eq!(point_count_mod_p(&curve(-16, 16), 5), Ok(8));
        assert_eq!(point_count_mod_p(&curve(-16, 16), 37), Err(GroupError::BadPlace(37)));
        assert_eq!(point_count_mod_p(&curve(-16, 16), 3), Err(GroupError::BadPlace(3)));
        assert!(matches!(point_count_mod_p(&curve(-16, 16), 1_000_003), Err(GroupError::PrimeTooLarge { .. })));
    }

    #[test]
    fn point_count_matches_enumeration() {
        for (a, b) in [(-16, 16), (0, 1), (2, -3), (-1, 1)] {
            let e = curve(a, b);
            for p in (5..200u64).filter(|&p| e.is_good_prime(p)) {
                assert_eq!(point_count_mod_p(&e, p).unwrap(), count_by_enumeration(a, b, p as i64), "{a},{b} mod {p}");
            }
        }
    }

    #[test]
    fn discriminant_of_37a() {
        assert_eq!(curve(-16, 16).discriminant(), BigInt::from(151552)); // 2^12 * 37
        assert!(Curve::new(BigInt::from(-3), BigInt::from(2)).is_err());
    }

    #[test]
    fn torsion_of_x3_plus_1() {
        let t = nagell_lutz_torsion(&curve(0, 1)).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.contains(&(pt(2, 3), 6)));
        assert!(t.contains(&(pt(-1, 0), 2)));
        assert!(t.contains(&(pt(0, 1), 3)));
        assert_eq!(nagell_lutz_torsion(&curve(-16, 16)).unwrap(), vec![(CurvePoint::Infinity, 1)]);
    }
}
