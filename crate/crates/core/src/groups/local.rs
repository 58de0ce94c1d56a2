//! The finite groups `B_v` and their arithmetic.

use serde::Serialize;

use crate::arith::{self, Factorization};

/// An element of `B_v`: a unit mod p, or a point of `E(F_p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum LocalElem {
    Unit(u64),
    Point(Option<(u64, u64)>),
}

/// Group law of `B_v` at a fixed prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalGroup {
    /// `(Z/p)^x`
    Units { p: u64 },
    /// `E(F_p)` for `y^2 = x^3 + ax + b`.
    Curve { p: u64, a: u64, b: u64 },
}

impl LocalGroup {
    pub fn prime(&self) -> u64 {
        match *self {
            LocalGroup::Units { p } | LocalGroup::Curve { p, .. } => p,
        }
    }

    pub fn identity(&self) -> LocalElem {
        match self {
            LocalGroup::Units { .. } => LocalElem::Unit(1),
            LocalGroup::Curve { .. } => LocalElem::Point(None),
        }
    }

    pub fn is_identity(&self, e: &LocalElem) -> bool {
        *e == self.identity()
    }

    pub fn neg(&self, e: &LocalElem) -> LocalElem {
        match (self, e) {
            (&LocalGroup::Units { p }, &LocalElem::Unit(u)) => {
                LocalElem::Unit(arith::mod_inverse(u, p).expect("units are invertible"))
            }
            (&LocalGroup::Curve { p, .. }, &LocalElem::Point(Some((x, y)))) => {
                LocalElem::Point(Some((x, (p - y) % p)))
            }
            _ => *e,
        }
    }

    pub fn add(&self, e: &LocalElem, f: &LocalElem) -> LocalElem {
        match (self, e, f) {
            (&LocalGroup::Units { p }, &LocalElem::Unit(u), &LocalElem::Unit(w)) => {
                LocalElem::Unit(arith::mul_mod(u, w, p))
            }
            (&LocalGroup::Curve { p, a, .. }, &LocalElem::Point(e), &LocalElem::Point(f)) => {
                LocalElem::Point(add_points(p, a, e, f))
            }
            _ => panic!("mixed element kinds in one local group"),
        }
    }

    /// `k * e` by double-and-add.
    pub fn mul(&self, e: &LocalElem, mut k: u64) -> LocalElem {
        let mut acc = self.identity();
        let mut base = *e;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }

    pub fn sub(&self, e: &LocalElem, f: &LocalElem) -> LocalElem {
        self.add(e, &self.neg(f))
    }

    /// Order of `e` given the factored group order.
    pub fn order(&self, e: &LocalElem, group_order: &Factorization) -> u64 {
        arith::generic_element_order(group_order, |k| self.mul(e, k), |x| self.is_identity(x))
            .expect("group order annihilates every element")
    }

    pub fn contains(&self, e: &LocalElem) -> bool {
        match (self, e) {
            (&LocalGroup::Units { p }, &LocalElem::Unit(u)) => u != 0 && u < p,
            (&LocalGroup::Curve { p, a, b }, &LocalElem::Point(Some((x, y)))) => {
                let lhs = arith::mul_mod(y, y, p);
                let rhs = (arith::mul_mod(arith::mul_mod(x, x, p), x, p) + arith::mul_mod(a, x, p) + b) % p;
                x < p && y < p && lhs == rhs
            }
            (LocalGroup::Curve { .. }, LocalElem::Point(None)) => true,
            _ => false,
        }
    }
}

fn add_points(p: u64, a: u64, e: Option<(u64, u64)>, f: Option<(u64, u64)>) -> Option<(u64, u64)> {
    let (Some((x1, y1)), Some((x2, y2))) = (e, f) else {
        return e.or(f);
    };
    let lambda = if x1 == x2 {
        if (y1 + y2) % p == 0 {
            return None;
        }
        let num = (3 * arith::mul_mod(x1, x1, p) + a) % p;
        let den = arith::mod_inverse(2 * y1 % p, p).expect("y != 0");
        arith::mul_mod(num, den, p)
    } else {
        let num = (y2 + p - y1) % p;
        let den = arith::mod_inverse((x2 + p - x1) % p, p).expect("x1 != x2");
        arith::mul_mod(num, den, p)
    };
    let x3 = (arith::mul_mod(lambda, lambda, p) + 2 * p - x1 - x2) % p;
    let y3 = (arith::mul_mod(lambda, (x1 + p - x3) % p, p) + p - y1) % p;
    Some((x3, y3))
}

/// Image of a global element in `B_v`, with its order and `|B_v|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedElement {
    pub place: u64,
    pub value: LocalElem,
    pub element_order: u64,
    pub group_order: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_group_order_by_repeated_addition() {
        // y^2 = x^3 - 16x + 16 over F_5 is y^2 = x^3 + 4x + 1
        let g = LocalGroup::Curve { p: 5, a: 4, b: 1 };
        let p = LocalElem::Point(Some((0, 4)));
        assert!(g.contains(&p));
        let mut acc = p;
        let mut n = 1;
        while !g.is_identity(&acc) {
            acc = g.add(&acc, &p);
            n += 1;
        }
        let eight = arith::factorize(8).unwrap();
        assert_eq!(g.order(&p, &eight), n);
        assert_eq!(g.mul(&p, n), g.identity());
    }

    #[test]
    fn units_arithmetic() {
        let g = LocalGroup::Units { p: 7 };
        assert_eq!(g.mul(&LocalElem::Unit(2), 3), LocalElem::Unit(1));
        assert_eq!(g.neg(&LocalElem::Unit(2)), LocalElem::Unit(4));
        assert_eq!(g.order(&LocalElem::Unit(3), &arith::factorize(6).unwrap()), 6);
    }
}
