use num_integer::Integer;
use serde::Serialize;

use super::{Instance, LocalGlobalError};
use crate::arith;
use crate::groups::{self, GroupElement, RelationLattice};
use crate::qforms::{self, DiagonalForm, Place};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnsolvableReason {
    /// Trivial relation lattice: only `x = 0` sends the points into torsion.
    IndependentPoints,
    /// Rank-1 lattice whose generator is not `+-` a vector of squares.
    GeneratorNotSquares { generator: Vec<i64> },
    /// Rank-2 lattice with normal `n`; the form `n_1 x^2 + n_2 y^2 + n_3 z^2` is anisotropic.
    AnisotropicNormal { normal: Vec<i64>, failing_places: Vec<Place> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Solvable { witness: Vec<i64>, torsion: GroupElement },
    Unsolvable { reason: UnsolvableReason },
    IndependentUncertified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GlobalDecision {
    #[serde(flatten)]
    pub status: Status,
    pub certificate: RelationLattice,
}

impl GlobalDecision {
    pub fn is_solvable(&self) -> bool {
        matches!(self.status, Status::Solvable { .. })
    }
}

pub fn global_decide_rank2(instance: &Instance) -> Result<GlobalDecision, LocalGlobalError> {
    if instance.rank() != 2 {
        return Err(LocalGlobalError::BadRank { expected: "2", got: instance.rank() });
    }
    global_decide(instance)
}

pub fn global_decide_rank3(instance: &Instance) -> Result<GlobalDecision, LocalGlobalError> {
    if instance.rank() != 3 {
        return Err(LocalGlobalError::BadRank { expected: "3", got: instance.rank() });
    }
    global_decide(instance)
}

/// Exact decision for 2 or 3 points.
///
/// `sum x_i^2 P_i` is torsion iff `(x_1^2, ..., x_r^2)` lies in the relation
/// lattice `L`. Since the points have infinite order, `rank L <= r - 1`.
pub fn global_decide(instance: &Instance) -> Result<GlobalDecision, LocalGlobalError> {
    if !(2..=3).contains(&instance.rank()) {
        return Err(LocalGlobalError::BadRank { expected: "2 or 3", got: instance.rank() });
    }
    let lattice = instance.relation_lattice()?;
    let status = match lattice.rank() {
        0 if lattice.certified => Status::Unsolvable { reason: UnsolvableReason::IndependentPoints },
        0 => Status::IndependentUncertified,
        1 => {
            let g = &lattice.basis[0];
            match signed_square_roots(g) {
                Some(witness) => solvable(instance, witness)?,
                // a larger uncertified lattice could still contain a square vector
                None if !lattice.certified => Status::IndependentUncertified,
                None => Status::Unsolvable { reason: UnsolvableReason::GeneratorNotSquares { generator: g.clone() } },
            }
        }
        2 if instance.rank() == 3 => {
            let wide = |r: &Vec<i64>| r.iter().map(|&x| x as i128).collect::<Vec<_>>();
            let n = groups::cross(&wide(&lattice.basis[0]), &wide(&lattice.basis[1]));
            let g = n.iter().fold(0i128, |g, x| g.gcd(x));
            let normal = n
                .iter()
                .map(|x| i64::try_from(x / g))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| LocalGlobalError::Inconsistent("lattice normal overflows".into()))?;
            if normal.contains(&0) {
                return Err(LocalGlobalError::Inconsistent(format!(
                    "normal {normal:?} has a zero entry, so some point is torsion"
                )));
            }
            let form = DiagonalForm::new(normal.clone())?;
            match qforms::find_isotropic_vector(&form)? {
                Some(witness) => solvable(instance, witness)?,
                None => Status::Unsolvable {
                    reason: UnsolvableReason::AnisotropicNormal {
                        failing_places: qforms::failing_places(&form)?,
                        normal,
                    },
                },
            }
        }
        k => {
            return Err(LocalGlobalError::Inconsistent(format!(
                "relation lattice of rank {k} for {} points of infinite order",
                instance.rank()
            )))
        }
    };
    Ok(GlobalDecision { status, certificate: lattice })
}

/// `Some(x)` with `g = +-(x_i^2)` coordinatewise.
fn signed_square_roots(g: &[i64]) -> Option<Vec<i64>> {
    let sign = if g.iter().any(|&x| x > 0) { 1 } else { -1 };
    g.iter()
        .map(|&x| {
            let v = x * sign;
            if v < 0 {
                return None;
            }
            arith::exact_sqrt(v as u64).map(|r| r as i64)
        })
        .collect()
}

fn solvable(instance: &Instance, witness: Vec<i64>) -> Result<Status, LocalGlobalError> {
    let squares = witness
        .iter()
        .map(|&x| x.checked_mul(x))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| LocalGlobalError::Inconsistent(format!("witness {witness:?} too large")))?;
    let torsion = groups::linear_combination(&squares, instance.points())?;
    let primitive = witness.iter().fold(0i64, |g, x| g.gcd(x)) == 1;
    if !primitive || !instance.torsion().contains(&torsion) {
        return Err(LocalGlobalError::Inconsistent(format!("witness {witness:?} fails exact verification")));
    }
    Ok(Status::Solvable { witness, torsion })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::groups::{scalar_mul, Context, SUnitContext};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn witness(d: &GlobalDecision) -> Vec<i64> {
        match &d.status {
            Status::Solvable { witness, .. } => witness.clone(),
            other => panic!("expected solvable, got {other:?}"),
        }
    }

    #[test]
    fn rank2_examples() {
        let d = global_decide_rank2(&sunits(&[2], &[(2, 1), (1, 16)])).unwrap();
        assert_eq!(witness(&d), vec![2, 1]);
        assert_eq!(d.certificate.basis, vec![vec![4, 1]]);

        let d = global_decide_rank2(&sunits(&[2], &[(2, 1), (1, 8)])).unwrap();
        assert_eq!(d.status, Status::Unsolvable { reason: UnsolvableReason::GeneratorNotSquares { generator: vec![3, 1] } });

        let d = global_decide_rank2(&multiples_37(&[1, -4])).unwrap();
        assert_eq!(witness(&d), vec![2, 1]);
        assert!(matches!(&d.status, Status::Solvable { torsion, .. } if torsion.is_identity()));

        let d = global_decide_rank2(&sunits(&[2, 3], &[(2, 1), (3, 1)])).unwrap();
        assert_eq!(d.status, Status::Unsolvable { reason: UnsolvableReason::IndependentPoints });

        assert!(global_decide_rank2(&multiples_37(&[1, 2, 3])).is_err());
    }

    #[test]
    fn rank2_with_torsion_target() {
        let e = curve(2, -3);
        let p = e.point(&q(2, 1), &q(3, 1)).unwrap();
        let t = e.point(&q(1, 1), &q(0, 1)).unwrap();
        let inst = Instance::new(vec![p.clone(), groups::add(&scalar_mul(-4, &p), &t).unwrap()], vec![], 20).unwrap();
        let d = global_decide(&inst).unwrap();
        assert_eq!(witness(&d), vec![2, 1]);
        assert!(matches!(&d.status, Status::Solvable { torsion, .. } if *torsion == t));
    }

    #[test]
    fn rank3_examples() {
        let d = global_decide_rank3(&sunits(&[2], &[(2, 1), (4, 1), (1, 8)])).unwrap();
        assert_eq!(witness(&d), vec![1, 1, 1]);

        let d = global_decide_rank3(&sunits(&[2], &[(2, 1), (4, 1), (8, 1)])).unwrap();
        assert!(matches!(
            &d.status,
            Status::Unsolvable { reason: UnsolvableReason::AnisotropicNormal { failing_places, .. } }
                if failing_places.contains(&Place::Infinite)
        ));

        let d = global_decide_rank3(&multiples_37(&[1, -4, -9])).unwrap();
        let w = witness(&d);
        let sq: i64 = w[0] * w[0] - 4 * w[1] * w[1] - 9 * w[2] * w[2];
        assert_eq!(sq, 0);

        assert!(!global_decide_rank3(&multiples_37(&[1, 2, 3])).unwrap().is_solvable());
        let d = global_decide_rank3(&sunits(&[2, 3, 5], &[(2, 1), (3, 1), (5, 1)])).unwrap();
        assert_eq!(d.status, Status::Unsolvable { reason: UnsolvableReason::IndependentPoints });
        assert!(global_decide_rank3(&sunits(&[2, 3], &[(2, 1), (3, 1), (1, 6)])).unwrap().is_solvable());
        let d = global_decide_rank3(&sunits(&[2, 3], &[(2, 1), (3, 1), (1, 12)])).unwrap();
        assert_eq!(d.status, Status::Unsolvable { reason: UnsolvableReason::GeneratorNotSquares { generator: vec![2, 1, 1] } });
    }

    #[test]
    fn uncertified_independence_is_reported() {
        // relation 21P + Q = 0 lies outside a search bound of 5
        let p = p37();
        let inst = Instance::new(vec![p.clone(), scalar_mul(-21, &p)], vec![], 5).unwrap();
        assert_eq!(global_decide(&inst).unwrap().status, Status::IndependentUncertified);
        let declared = Instance::new(vec![p.clone(), scalar_mul(-21, &p)], vec![vec![21, 1]], 5).unwrap();
        assert!(!global_decide(&declared).unwrap().is_solvable());
        assert!(global_decide(&declared).unwrap().certificate.certified);
    }

    fn sunit_instance(exps: &[Vec<i64>]) -> Option<Instance> {
        let ctx = Arc::new(Context::SUnits(SUnitContext::new(vec![2, 3]).unwrap()));
        let mut points = Vec::new();
        for e in exps {
            if e.iter().all(|&x| x == 0) {
                return None;
            }
            let v = q(2, 1).pow(e[0] as i32) * q(3, 1).pow(e[1] as i32);
            points.push(ctx.sunit(&v).unwrap());
        }
        Some(Instance::new(points, vec![], 20).unwrap())
    }

    /// Exhaustive primitive `x` with `max |x_i| <= bound` and `sum x_i^2 e_i = 0`.
    /// The sign of `T` is free, so exponents decide.
    fn brute_force(exps: &[Vec<i64>], bound: i64) -> bool {
        let r = exps.len();
        let mut x = vec![0i64; r];
        loop {
            let primitive = x.iter().fold(0i64, |g, v| g.gcd(v)) == 1;
            if primitive && (0..2).all(|j| x.iter().zip(exps).map(|(xi, e)| xi * xi * e[j]).sum::<i64>() == 0) {
                return true;
            }
            let mut i = 0;
            while i < r {
                x[i] += 1;
                if x[i] <= bound {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
            if i == r {
                return false;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn rank2_agrees_with_brute_force(e in proptest::collection::vec(proptest::collection::vec(-6i64..=6, 2), 2)) {
            let Some(inst) = sunit_instance(&e) else { return Ok(()) };
            let d = global_decide_rank2(&inst).unwrap();
            prop_assert_eq!(d.is_solvable(), brute_force(&e, 50));
        }

        #[test]
        fn rank3_agrees_with_brute_force(e in proptest::collection::vec(proptest::collection::vec(-6i64..=6, 2), 3)) {
            let Some(inst) = sunit_instance(&e) else { return Ok(()) };
            let d = global_decide_rank3(&inst).unwrap();
            prop_assert_eq!(d.is_solvable(), brute_force(&e, 30), "{:?}", d.status);
        }
    }
}
