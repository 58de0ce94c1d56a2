//! Mordell-Weil type groups with reduction maps.
//!
//! Two backends are provided: the S-units of Q and the rational points of
//! an elliptic curve in short Weierstrass form. Both expose the same data:
//! the group law, the torsion subgroup, the good places and the reduction
//! homomorphisms `r_v : B -> B_v` into finite groups.

mod curve;
mod lattice;
mod local;
mod sunit;

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

pub use curve::{point_count_mod_p, Curve, CurvePoint, POINT_COUNT_CAP};
pub use local::{LocalElem, LocalGroup, ReducedElement};
pub use sunit::{su_make, su_value, SUnit, SUnitContext};

pub(crate) use lattice::{cross, hermite_normal_form, integer_kernel, saturate};

use crate::arith::{self, ArithError, Factorization};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("invalid group context: {0}")]
    InvalidContext(String),
    #[error("{0} is not an S-unit for this context")]
    NotAnSUnit(String),
    #[error("point {0} is not on the curve")]
    NotOnCurve(String),
    #[error("elements belong to different groups")]
    ContextMismatch,
    #[error("{0} is not a good place for this group")]
    BadPlace(u64),
    #[error("prime {p} exceeds the point-counting cap {cap}")]
    PrimeTooLarge { p: u64, cap: u64 },
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The group `B` an element lives in.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Context {
    SUnits(SUnitContext),
    Elliptic(Curve),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ElementValue {
    SUnit(SUnit),
    Point(CurvePoint),
}

/// An element of `B` together with the group it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    context: Arc<Context>,
    value: ElementValue,
}

pub(crate) fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl Context {
    pub fn identity(self: &Arc<Self>) -> GroupElement {
        let value = match &**self {
            Context::SUnits(ctx) => ElementValue::SUnit(SUnit::one(ctx)),
            Context::Elliptic(_) => ElementValue::Point(CurvePoint::Infinity),
        };
        GroupElement { context: self.clone(), value }
    }

    /// S-unit from a rational number.
    pub fn sunit(self: &Arc<Self>, q: &BigRational) -> Result<GroupElement, GroupError> {
        match &**self {
            Context::SUnits(ctx) => Ok(GroupElement { context: self.clone(), value: ElementValue::SUnit(su_make(ctx, q)?) }),
            Context::Elliptic(_) => Err(GroupError::ContextMismatch),
        }
    }

    /// Curve point from affine rational coordinates, checked to lie on the curve.
    pub fn point(self: &Arc<Self>, x: &BigRational, y: &BigRational) -> Result<GroupElement, GroupError> {
        match &**self {
            Context::Elliptic(curve) => {
                if !curve.contains(x, y) {
                    return Err(GroupError::NotOnCurve(format!("({}, {})", rational_string(x), rational_string(y))));
                }
                Ok(GroupElement { context: self.clone(), value: ElementValue::Point(CurvePoint::from_affine(x, y)) })
            }
            Context::SUnits(_) => Err(GroupError::ContextMismatch),
        }
    }

    pub fn is_good_place(&self, p: u64) -> bool {
        match self {
            Context::SUnits(ctx) => p > 2 && arith::is_prime(p) && !ctx.primes().contains(&p),
            Context::Elliptic(curve) => curve.is_good_prime(p),
        }
    }

    /// Good places in `[p_min, p_max]`, ascending.
    pub fn good_places(&self, p_min: u64, p_max: u64) -> Vec<u64> {
        (p_min..=p_max).filter(|&p| self.is_good_place(p)).collect()
    }

    /// All torsion elements with their orders, identity first.
    pub fn torsion_subgroup(self: &Arc<Self>) -> Result<TorsionSubgroup, GroupError> {
        let elements = match &**self {
            Context::SUnits(ctx) => vec![
                (self.identity(), 1),
                (
                    GroupElement {
                        context: self.clone(),
                        value: ElementValue::SUnit(SUnit { sign: -1, exponents: vec![0; ctx.rank()] }),
                    },
                    2,
                ),
            ],
            Context::Elliptic(curve) => {
                let points = curve::nagell_lutz_torsion(curve)?;
                let bound = self.torsion_order_bound(8)?;
                if bound % points.len() as u64 != 0 {
                    return Err(GroupError::Inconsistent(format!(
                        "{} torsion points found but point counts bound the torsion by {bound}",
                        points.len()
                    )));
                }
                points
                    .into_iter()
                    .map(|(p, n)| (GroupElement { context: self.clone(), value: ElementValue::Point(p) }, n))
                    .collect()
            }
        };
        Ok(TorsionSubgroup { elements })
    }

    /// gcd of `|E(F_p)|` over the first `count` good primes.
    fn torsion_order_bound(&self, count: usize) -> Result<u64, GroupError> {
        let Context::Elliptic(curve) = self else { return Ok(2) };
        let mut g = 0u64;
        let mut seen = 0;
        let mut p = 5;
        while seen < count {
            if curve.is_good_prime(p) {
                g = g.gcd(&point_count_mod_p(curve, p)?);
                seen += 1;
            }
            p += 2;
        }
        Ok(g)
    }

    /// The reduction map at a good place.
    pub fn reduction(self: &Arc<Self>, p: u64) -> Result<Reduction, GroupError> {
        if !self.is_good_place(p) {
            return Err(GroupError::BadPlace(p));
        }
        let (group, order) = match &**self {
            Context::SUnits(_) => (LocalGroup::Units { p }, p - 1),
            Context::Elliptic(curve) => {
                let (a, b) = curve.coeffs_mod(p);
                (LocalGroup::Curve { p, a, b }, point_count_mod_p(curve, p)?)
            }
        };
        Ok(Reduction { context: self.clone(), group, order: arith::factorize(order)? })
    }
}

impl GroupElement {
    pub fn context(&self) -> &Arc<Context> {
        &self.context
    }

    pub fn value(&self) -> &ElementValue {
        &self.value
    }

    fn same_group(&self, other: &GroupElement) -> Result<(), GroupError> {
        if Arc::ptr_eq(&self.context, &other.context) || self.context == other.context {
            Ok(())
        } else {
            Err(GroupError::ContextMismatch)
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.value {
            ElementValue::SUnit(u) => u.is_one(),
            ElementValue::Point(p) => p.is_infinity(),
        }
    }

    /// Finite-order test: exact for S-units; `nP = O` for some `n <= 16` on curves.
    pub fn is_torsion(&self) -> bool {
        match (&*self.context, &self.value) {
            (_, ElementValue::SUnit(u)) => u.is_torsion(),
            (Context::Elliptic(curve), ElementValue::Point(p)) => curve::small_order(curve, p).is_some(),
            _ => unreachable!("element kind matches its context"),
        }
    }

    pub fn neg(&self) -> GroupElement {
        let value = match &self.value {
            ElementValue::SUnit(u) => ElementValue::SUnit(u.inverse()),
            ElementValue::Point(p) => ElementValue::Point(curve::negate(p)),
        };
        GroupElement { context: self.context.clone(), value }
    }

    /// Whether the stored representation is canonical and lies in its group.
    pub fn is_well_formed(&self) -> bool {
        match (&*self.context, &self.value) {
            (Context::SUnits(ctx), ElementValue::SUnit(u)) => u.exponents.len() == ctx.rank() && u.sign.abs() == 1,
            (Context::Elliptic(curve), ElementValue::Point(p)) => {
                curve::on_curve(curve, p)
                    && match p {
                        CurvePoint::Infinity => true,
                        CurvePoint::Finite { x, y, z } => {
                            z > &BigInt::from(0) && x.gcd(y).gcd(z) == BigInt::from(1)
                        }
                    }
            }
            _ => false,
        }
    }
}

/// Group law of `B`.
pub fn add(g: &GroupElement, h: &GroupElement) -> Result<GroupElement, GroupError> {
    g.same_group(h)?;
    let value = match (&*g.context, &g.value, &h.value) {
        (_, ElementValue::SUnit(u), ElementValue::SUnit(w)) => ElementValue::SUnit(u.mul(w)),
        (Context::Elliptic(curve), ElementValue::Point(p), ElementValue::Point(q)) => {
            ElementValue::Point(curve::add(curve, p, q))
        }
        _ => return Err(GroupError::ContextMismatch),
    };
    Ok(GroupElement { context: g.context.clone(), value })
}

/// `n * g`, with `0 * g` the identity and `(-n) * g = -(n * g)`.
pub fn scalar_mul(n: i64, g: &GroupElement) -> GroupElement {
    let value = match (&*g.context, &g.value) {
        (_, ElementValue::SUnit(u)) => ElementValue::SUnit(u.pow(n)),
        (Context::Elliptic(curve), ElementValue::Point(p)) => ElementValue::Point(curve::scalar_mul(curve, n, p)),
        _ => unreachable!("element kind matches its context"),
    };
    GroupElement { context: g.context.clone(), value }
}

/// `sum_i c_i P_i`.
pub fn linear_combination(coeffs: &[i64], points: &[GroupElement]) -> Result<GroupElement, GroupError> {
    let first = points.first().ok_or_else(|| GroupError::InvalidContext("no points".into()))?;
    let mut acc = first.context.identity();
    for (&c, p) in coeffs.iter().zip(points) {
        if c != 0 {
            acc = add(&acc, &scalar_mul(c, p))?;
        }
    }
    Ok(acc)
}

/// Good places of the group in `[p_min, p_max]`.
pub fn good_places(context: &Context, p_min: u64, p_max: u64) -> Vec<u64> {
    context.good_places(p_min, p_max)
}

/// `r_p(g)` with its order and the order of `B_p`.
pub fn reduce(g: &GroupElement, p: u64) -> Result<ReducedElement, GroupError> {
    g.context.reduction(p)?.reduce(g)
}

/// The reduction map `B -> B_p` at one good place.
#[derive(Debug, Clone)]
pub struct Reduction {
    context: Arc<Context>,
    group: LocalGroup,
    order: Factorization,
}

impl Reduction {
    pub fn prime(&self) -> u64 {
        self.group.prime()
    }

    pub fn group(&self) -> &LocalGroup {
        &self.group
    }

    pub fn group_order(&self) -> &Factorization {
        &self.order
    }

    pub fn image(&self, g: &GroupElement) -> Result<LocalElem, GroupError> {
        g.same_group(&self.context.identity())?;
        let p = self.prime();
        Ok(match (&*self.context, &g.value) {
            (Context::SUnits(ctx), ElementValue::SUnit(u)) => LocalElem::Unit(sunit::su_residue(ctx, u, p)),
            (Context::Elliptic(_), ElementValue::Point(CurvePoint::Infinity)) => LocalElem::Point(None),
            (Context::Elliptic(_), ElementValue::Point(CurvePoint::Finite { x, y, z })) => {
                let m = BigInt::from(p);
                let zr = z.mod_floor(&m).to_u64().expect("reduced");
                if zr == 0 {
                    LocalElem::Point(None)
                } else {
                    let zinv = arith::mod_inverse(zr, p).expect("p does not divide z");
                    let xr = x.mod_floor(&m).to_u64().expect("reduced");
                    let yr = y.mod_floor(&m).to_u64().expect("reduced");
                    LocalElem::Point(Some((arith::mul_mod(xr, zinv, p), arith::mul_mod(yr, zinv, p))))
                }
            }
            _ => return Err(GroupError::ContextMismatch),
        })
    }

    pub fn order_of(&self, e: &LocalElem) -> u64 {
        self.group.order(e, &self.order)
    }

    pub fn reduce(&self, g: &GroupElement) -> Result<ReducedElement, GroupError> {
        let value = self.image(g)?;
        Ok(ReducedElement {
            place: self.prime(),
            value,
            element_order: self.order_of(&value),
            group_order: self.order.value(),
        })
    }

    /// Images of the torsion elements, as a set.
    pub fn torsion_image(&self, torsion: &TorsionSubgroup) -> Result<HashSet<LocalElem>, GroupError> {
        torsion.elements.iter().map(|(t, _)| self.image(t)).collect()
    }
}

/// The torsion subgroup `B_tors`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionSubgroup {
    pub elements: Vec<(GroupElement, u64)>,
}

impl TorsionSubgroup {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.iter().any(|(t, _)| t == g)
    }
}

/// Integer vectors `a` with `sum a_i P_i` torsion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationLattice {
    pub points: Vec<GroupElement>,
    /// Hermite normal form basis.
    pub basis: Vec<Vec<i64>>,
    /// `true` when the basis generates every relation.
    pub certified: bool,
}

impl RelationLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

fn to_i64_rows(rows: Vec<Vec<i128>>) -> Result<Vec<Vec<i64>>, GroupError> {
    rows.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| i64::try_from(x).map_err(|_| GroupError::TooLarge("relation coefficient".into())))
                .collect()
        })
        .collect()
}

/// Number of good primes used to filter candidate curve relations.
const FILTER_PRIMES: usize = 6;

/// Relation lattice of 1 to 3 points.
///
/// S-units: exact kernel of the exponent matrix. Curves: every vector of
/// max-norm at most `search_bound` is filtered through reductions at a few
/// good primes, survivors are verified exactly, and the result is saturated.
/// Saturation is sound because the true lattice is saturated; a curve lattice
/// is certified once it reaches rank `m - 1`, since a saturated lattice of
/// that rank contained in the true one equals it.
pub fn relation_lattice(points: &[GroupElement], search_bound: u64) -> Result<RelationLattice, GroupError> {
    let m = points.len();
    if !(1..=3).contains(&m) {
        return Err(GroupError::InvalidContext(format!("relation lattice needs 1 to 3 points, got {m}")));
    }
    let context = points[0].context.clone();
    for p in points {
        p.same_group(&points[0])?;
    }
    match &*context {
        Context::SUnits(ctx) => {
            let rows: Vec<Vec<i128>> = (0..ctx.rank())
                .map(|j| {
                    points
                        .iter()
                        .map(|p| match &p.value {
                            ElementValue::SUnit(u) => u.exponents[j] as i128,
                            ElementValue::Point(_) => unreachable!(),
                        })
                        .collect()
                })
                .collect();
            let basis = hermite_normal_form(&integer_kernel(&rows, m), m);
            Ok(RelationLattice { points: points.to_vec(), basis: to_i64_rows(basis)?, certified: true })
        }
        Context::Elliptic(_) => curve_relations(&context, points, search_bound),
    }
}

fn curve_relations(context: &Arc<Context>, points: &[GroupElement], bound: u64) -> Result<RelationLattice, GroupError> {
    let m = points.len();
    let torsion = context.torsion_subgroup()?;
    let any_infinite = points.iter().any(|p| !p.is_torsion());
    let max_rank = if any_infinite { m - 1 } else { m };
    let b = bound as i64;

    struct Filter {
        group: LocalGroup,
        multiples: Vec<Vec<LocalElem>>,
        torsion: HashSet<LocalElem>,
    }
    let mut filters = Vec::with_capacity(FILTER_PRIMES);
    let mut p = 5;
    while filters.len() < FILTER_PRIMES {
        if context.is_good_place(p) {
            let red = context.reduction(p)?;
            let mut multiples = Vec::with_capacity(m);
            for pt in points {
                let img = red.image(pt)?;
                let neg = red.group().neg(&img);
                let mut row = vec![red.group().identity(); (2 * b + 1) as usize];
                for k in 1..=b {
                    row[(b + k) as usize] = red.group().add(&row[(b + k - 1) as usize], &img);
                    row[(b - k) as usize] = red.group().add(&row[(b - k + 1) as usize], &neg);
                }
                multiples.push(row);
            }
            filters.push(Filter { torsion: red.torsion_image(&torsion)?, group: red.group().clone(), multiples });
        }
        p += 2;
    }

    let passes = |v: &[i64]| {
        filters.iter().all(|f| {
            let mut acc = f.group.identity();
            for (i, &c) in v.iter().enumerate() {
                acc = f.group.add(&acc, &f.multiples[i][(c + b) as usize]);
            }
            f.torsion.contains(&acc)
        })
    };

    let mut candidates = Vec::new();
    let mut v = vec![-b; m];
    loop {
        let leading = v.iter().find(|&&c| c != 0);
        if matches!(leading, Some(&c) if c > 0) && passes(&v) {
            candidates.push(v.clone());
        }
        let mut i = m;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if v[i] < b {
                v[i] += 1;
                break;
            }
            v[i] = -b;
            if i == 0 {
                i = usize::MAX;
                break;
            }
        }
        if i == usize::MAX {
            break;
        }
    }
    candidates.sort_by_key(|v| (v.iter().map(|c| c.unsigned_abs()).max(), v.clone()));

    let mut verified: Vec<Vec<i128>> = Vec::new();
    for cand in candidates {
        if lattice::rank(&verified, m) == max_rank {
            break;
        }
        let as_wide: Vec<i128> = cand.iter().map(|&c| c as i128).collect();
        let mut extended = verified.clone();
        extended.push(as_wide.clone());
        if lattice::rank(&extended, m) == lattice::rank(&verified, m) {
            continue;
        }
        if torsion.contains(&linear_combination(&cand, points)?) {
            verified.push(as_wide);
        }
    }

    let basis = to_i64_rows(saturate(&verified, m))?;
    for row in &basis {
        if !torsion.contains(&linear_combination(row, points)?) {
            return Err(GroupError::Inconsistent(format!("saturated relation {row:?} is not torsion")));
        }
    }
    let certified = basis.len() == max_rank;
    Ok(RelationLattice { points: points.to_vec(), basis, certified })
}

/// `{"backend": "sunits", "S": [...]}` or `{"backend": "elliptic", "A": "..", "B": ".."}`.
impl Serialize for Context {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(3))?;
        match self {
            Context::SUnits(ctx) => {
                map.serialize_entry("backend", "sunits")?;
                map.serialize_entry("S", ctx.primes())?;
            }
            Context::Elliptic(curve) => {
                map.serialize_entry("backend", "elliptic")?;
                map.serialize_entry("A", &curve.a().to_string())?;
                map.serialize_entry("B", &curve.b().to_string())?;
            }
        }
        map.end()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&*self.context, &self.value) {
            (Context::SUnits(ctx), ElementValue::SUnit(u)) => write!(f, "{}", rational_string(&su_value(ctx, u))),
            (_, ElementValue::Point(p)) => match p.affine() {
                None => write!(f, "infinity"),
                Some((x, y)) => write!(f, "({}, {})", rational_string(&x), rational_string(&y)),
            },
            _ => unreachable!(),
        }
    }
}

/// S-units as `"num/den"`, curve points as `["x", "y"]` or `"infinity"`.
impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match (&*self.context, &self.value) {
            (Context::SUnits(ctx), ElementValue::SUnit(u)) => s.serialize_str(&rational_string(&su_value(ctx, u))),
            (_, ElementValue::Point(p)) => match p.affine() {
                None => s.serialize_str("infinity"),
                Some((x, y)) => {
                    let mut seq = s.serialize_seq(Some(2))?;
                    seq.serialize_element(&rational_string(&x))?;
                    seq.serialize_element(&rational_string(&y))?;
                    seq.end()
                }
            },
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn sunits(primes: &[u64]) -> Arc<Context> {
        Arc::new(Context::SUnits(SUnitContext::new(primes.to_vec()).unwrap()))
    }

    fn elliptic(a: i64, b: i64) -> Arc<Context> {
        Arc::new(Context::Elliptic(Curve::new(a.into(), b.into()).unwrap()))
    }

    fn pt(ctx: &Arc<Context>, x: i64, y: i64) -> GroupElement {
        ctx.point(&q(x, 1), &q(y, 1)).unwrap()
    }

    #[test]
    fn sunit_group_law() {
        let s = sunits(&[2]);
        let two = s.sunit(&q(2, 1)).unwrap();
        let sixteenth = s.sunit(&q(1, 16)).unwrap();
        assert_eq!(add(&two, &sixteenth).unwrap(), s.sunit(&q(1, 8)).unwrap());
        assert_eq!(scalar_mul(4, &two), s.sunit(&q(16, 1)).unwrap());
        assert!(scalar_mul(0, &two).is_identity());
        assert!(add(&two, &two.neg()).unwrap().is_identity());
        let other = sunits(&[3]);
        assert_eq!(add(&two, &other.sunit(&q(3, 1)).unwrap()), Err(GroupError::ContextMismatch));
    }

    #[test]
    fn curve_group_law() {
        let e = elliptic(-16, 16);
        let p = pt(&e, 0, 4);
        assert_eq!(add(&p, &p).unwrap(), pt(&e, 4, 4));
        assert_eq!(scalar_mul(2, &p), pt(&e, 4, 4));
        assert!(add(&p, &p.neg()).unwrap().is_identity());
        assert!(matches!(e.point(&q(1, 1), &q(2, 1)), Err(GroupError::NotOnCurve(_))));
    }

    #[test]
    fn torsion_examples() {
        let s = sunits(&[2, 3]);
        let t = s.torsion_subgroup().unwrap();
        assert_eq!(t.order(), 2);
        assert!(t.contains(&s.sunit(&q(-1, 1)).unwrap()));

        let e37 = elliptic(-16, 16);
        assert_eq!(e37.torsion_subgroup().unwrap().order(), 1);

        let e = elliptic(0, 1);
        let t = e.torsion_subgroup().unwrap();
        assert_eq!(t.order(), 6);
        assert!(t.elements.contains(&(pt(&e, 2, 3), 6)));
        assert!(t.elements.contains(&(pt(&e, -1, 0), 2)));
    }

    #[test]
    fn good_places_examples() {
        assert_eq!(good_places(&sunits(&[2]), 3, 13), vec![3, 5, 7, 11, 13]);
        let g = good_places(&elliptic(-16, 16), 2, 50);
        assert!(!g.contains(&2) && !g.contains(&3) && !g.contains(&37));
        assert_eq!(g[0], 5);
        assert!(good_places(&sunits(&[2]), 5, 4).is_empty());
    }

    #[test]
    fn reduce_examples() {
        let s = sunits(&[2]);
        let r = reduce(&s.sunit(&q(2, 1)).unwrap(), 7).unwrap();
        assert_eq!((r.value, r.element_order, r.group_order), (LocalElem::Unit(2), 3, 6));
        let r = reduce(&s.sunit(&q(1, 16)).unwrap(), 7).unwrap();
        assert_eq!((r.value, r.element_order), (LocalElem::Unit(4), 3));
        let r = reduce(&s.identity(), 11).unwrap();
        assert_eq!((r.value, r.element_order), (LocalElem::Unit(1), 1));
        assert_eq!(reduce(&s.sunit(&q(2, 1)).unwrap(), 2), Err(GroupError::BadPlace(2)));

        let e = elliptic(-16, 16);
        let r = reduce(&pt(&e, 0, 4), 5).unwrap();
        assert_eq!(r.group_order, 8);
        // repeated addition oracle in B_5
        let red = e.reduction(5).unwrap();
        let mut acc = r.value;
        let mut n = 1;
        while !red.group().is_identity(&acc) {
            acc = red.group().add(&acc, &r.value);
            n += 1;
        }
        assert_eq!(r.element_order, n);
        assert_eq!(reduce(&pt(&e, 0, 4), 37), Err(GroupError::BadPlace(37)));
    }

    #[test]
    fn sunit_relation_lattices() {
        let s = sunits(&[2]);
        let l = relation_lattice(&[s.sunit(&q(2, 1)).unwrap(), s.sunit(&q(1, 16)).unwrap()], 20).unwrap();
        assert_eq!((l.basis.clone(), l.certified), (vec![vec![4, 1]], true));
        let s23 = sunits(&[2, 3]);
        let l = relation_lattice(&[s23.sunit(&q(2, 1)).unwrap(), s23.sunit(&q(3, 1)).unwrap()], 20).unwrap();
        assert!(l.basis.is_empty() && l.certified);
    }

    #[test]
    fn curve_relation_lattices() {
        let e = elliptic(-16, 16);
        let p = pt(&e, 0, 4);
        let l = relation_lattice(&[p.clone(), scalar_mul(-4, &p)], 20).unwrap();
        assert_eq!(l.basis, vec![vec![4, 1]]);
        assert!(l.certified);

        let l = relation_lattice(&[p.clone(), scalar_mul(-4, &p), scalar_mul(-9, &p)], 20).unwrap();
        assert_eq!(l.rank(), 2);
        assert!(l.certified);
        for row in &l.basis {
            assert!(linear_combination(row, &l.points).unwrap().is_identity());
        }
        // relation 9P + R = 0 lies outside a bound of 5, 4P + Q = 0 inside
        let l = relation_lattice(&[p.clone(), scalar_mul(-4, &p), scalar_mul(-9, &p)], 5).unwrap();
        assert!(l.rank() >= 1);

        let single = relation_lattice(&[p.clone()], 20).unwrap();
        assert!(single.basis.is_empty() && single.certified);
    }

    #[test]
    fn curve_relations_into_nontrivial_torsion() {
        // y^2 = x^3 + 2x - 3 has the 2-torsion point (1, 0) and P = (2, 3) of infinite order
        let e = elliptic(2, -3);
        let p = pt(&e, 2, 3);
        let t = pt(&e, 1, 0);
        assert!(!p.is_torsion());
        assert_eq!(e.torsion_subgroup().unwrap().order(), 2);
        let qpt = add(&scalar_mul(-4, &p), &t).unwrap();
        let l = relation_lattice(&[p, qpt], 20).unwrap();
        assert_eq!(l.basis, vec![vec![4, 1]]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn multiple(n: i64) -> GroupElement {
            scalar_mul(n, &pt(&elliptic(-16, 16), 0, 4))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn reduction_is_a_homomorphism(m in -12i64..12, n in -12i64..12, pi in 0usize..10) {
                let e = elliptic(-16, 16);
                let p = good_places(&e, 5, 200)[pi];
                let red = e.reduction(p).unwrap();
                let (a, b) = (multiple(m), multiple(n));
                let lhs = red.image(&add(&a, &b).unwrap()).unwrap();
                let rhs = red.group().add(&red.image(&a).unwrap(), &red.image(&b).unwrap());
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn curve_law_is_associative(l in -6i64..6, m in -6i64..6, n in -6i64..6) {
                let e = elliptic(2, -3);
                let p = pt(&e, 2, 3);
                let t = pt(&e, 1, 0);
                let a = scalar_mul(l, &p);
                let b = add(&scalar_mul(m, &p), &t).unwrap();
                let c = scalar_mul(n, &p);
                let left = add(&add(&a, &b).unwrap(), &c).unwrap();
                let right = add(&a, &add(&b, &c).unwrap()).unwrap();
                prop_assert!(left.is_well_formed());
                prop_assert_eq!(left, right);
            }

            #[test]
            fn sunit_reduction_is_a_homomorphism(e1 in -20i64..20, e2 in -20i64..20, f1 in -20i64..20, f2 in -20i64..20) {
                let s = sunits(&[2, 3]);
                let u = s.sunit(&(q(2, 1).pow(e1 as i32) * q(3, 1).pow(e2 as i32))).unwrap();
                let w = s.sunit(&(q(-2, 1).pow(f1 as i32) * q(3, 1).pow(f2 as i32))).unwrap();
                for p in good_places(&s, 5, 60) {
                    let red = s.reduction(p).unwrap();
                    let lhs = red.image(&add(&u, &w).unwrap()).unwrap();
                    let rhs = red.group().add(&red.image(&u).unwrap(), &red.image(&w).unwrap());
                    prop_assert_eq!(lhs, rhs);
                }
            }

            #[test]
            fn element_order_divides_group_order(n in 1i64..30, pi in 0usize..40) {
                let e = elliptic(-16, 16);
                let p = good_places(&e, 5, 400)[pi];
                let r = reduce(&multiple(n), p).unwrap();
                prop_assert_eq!(r.group_order % r.element_order, 0);
                let red = e.reduction(p).unwrap();
                prop_assert!(red.group().is_identity(&red.group().mul(&r.value, r.element_order)));
            }

            #[test]
            fn hasse_bound(a in -50i64..50, b in -50i64..50, pi in 0usize..60) {
                prop_assume!(4 * a * a * a + 27 * b * b != 0);
                let e = elliptic(a, b);
                let Context::Elliptic(curve) = &*e else { unreachable!() };
                let places = good_places(&e, 5, 1000);
                let p = places[pi.min(places.len() - 1)];
                let n = point_count_mod_p(curve, p).unwrap() as f64;
                prop_assert!((n - (p as f64 + 1.0)).abs() <= 2.0 * (p as f64).sqrt());
            }
        }
    }

    #[test]
    fn display_and_serialize() {
        let s = sunits(&[2]);
        assert_eq!(s.sunit(&q(-1, 8)).unwrap().to_string(), "-1/8");
        let e = elliptic(-16, 16);
        assert_eq!(pt(&e, 4, 4).to_string(), "(4/1, 4/1)");
        assert_eq!(e.identity().to_string(), "infinity");
        assert!(e.identity().value() == &ElementValue::Point(CurvePoint::Infinity));
        let _ = BigInt::one();
    }
}
