use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::LocalGlobalError;
use crate::arith;
use crate::groups::{Context, GroupElement, LocalElem};

/// `(x_1, ..., x_n)` with `(2 x_1^2 + x_2^2 + ... + x_n^2) P = 0` in `B_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub place: u64,
    pub order: u64,
    pub vector: Vec<i64>,
    /// `2 x_1^2 + x_2^2 + ... + x_n^2`, equal to `2 ord_p(P)`.
    pub coefficient: u64,
    pub verified: bool,
}

/// Local solution at `p` of the rank-`n` equation, `n >= 4`, which has no
/// global solution because `2 x_1^2 + x_2^2 + ... + x_n^2` is positive definite.
pub fn counterexample_rank_n(point: &GroupElement, p: u64, n: usize) -> Result<Counterexample, LocalGlobalError> {
    if n < 4 {
        return Err(LocalGlobalError::BadArgument(format!("rank {n} < 4 is decided by the global deciders")));
    }
    if point.is_torsion() {
        return Err(LocalGlobalError::InvalidInstance(format!("point {point} has finite order")));
    }
    if !point.context().is_good_place(p) {
        return Err(LocalGlobalError::BadPlace(p));
    }
    let red = point.context().reduction(p)?;
    let image = red.image(point)?;
    let k = red.order_of(&image);
    let (a, b, c) = arith::gauss_two_k(k)?;
    let mut vector = vec![a as i64, b as i64, c as i64, 1];
    vector.resize(n, 0);
    let coefficient = 2 * a * a + b * b + c * c + 1;
    let verified = coefficient == 2 * k && red.group().is_identity(&red.group().mul(&image, coefficient));
    if !verified {
        return Err(LocalGlobalError::Inconsistent(format!("counterexample {vector:?} fails at {p}")));
    }
    Ok(Counterexample { place: p, order: k, vector, coefficient, verified })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PositiveDefiniteReport {
    pub n: usize,
    pub box_bound: u64,
    /// Distinct positive values of `2 x_1^2 + x_2^2 + ... + x_n^2` over the box.
    pub coefficients_checked: usize,
    /// Places whose reductions show `c P` is not torsion.
    pub certificate_places: Vec<u64>,
    pub confirmed: bool,
}

/// Largest place tried when certifying `c P` non-torsion.
const CERTIFICATE_PLACE_LIMIT: u64 = 100_000;

/// `f(x) = 2 x_1^2 + x_2^2 + ... + x_n^2` vanishes only at `x = 0`, so no
/// nonzero `x` gives `f(x) P` torsion for `P` of infinite order. Checked on
/// the box `max |x_i| <= box_bound`: for every value `c = f(x) > 0`, some
/// good place has `c r_p(P)` outside the reduced torsion.
pub fn positive_definite_check(
    point: &GroupElement,
    n: usize,
    box_bound: u64,
) -> Result<PositiveDefiniteReport, LocalGlobalError> {
    if n == 0 {
        return Err(LocalGlobalError::BadArgument("n must be positive".into()));
    }
    let mut values: BTreeSet<u64> = BTreeSet::from([0]);
    for i in 0..n {
        let weight = if i == 0 { 2 } else { 1 };
        values = values.iter().flat_map(|&v| (0..=box_bound).map(move |x| v + weight * x * x)).collect();
    }
    values.remove(&0);

    let context = point.context();
    let torsion = context.torsion_subgroup()?;
    let mut places = Vec::new();
    let mut confirmed = true;
    let mut cache: Vec<(u64, u64, LocalElem, HashSet<LocalElem>, crate::groups::LocalGroup)> = Vec::new();
    let mut next_place = 3;
    'coeffs: for &c in &values {
        let mut idx = 0;
        loop {
            if idx == cache.len() {
                while next_place <= CERTIFICATE_PLACE_LIMIT && !context.is_good_place(next_place) {
                    next_place += 1;
                }
                if next_place > CERTIFICATE_PLACE_LIMIT {
                    confirmed = false;
                    continue 'coeffs;
                }
                let red = context.reduction(next_place)?;
                let image = red.image(point)?;
                let order = red.order_of(&image);
                cache.push((next_place, order, image, red.torsion_image(&torsion)?, red.group().clone()));
                next_place += 1;
            }
            let (p, order, image, tors, group) = &cache[idx];
            if !tors.contains(&group.mul(image, c % order)) {
                if !places.contains(p) {
                    places.push(*p);
                }
                continue 'coeffs;
            }
            idx += 1;
        }
    }
    places.sort_unstable();
    Ok(PositiveDefiniteReport {
        n,
        box_bound,
        coefficients_checked: values.len(),
        certificate_places: places,
        confirmed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assumption1Report {
    pub l: u64,
    pub pattern: Vec<u32>,
    pub p_max: u64,
    pub matches: usize,
    pub total: usize,
    /// `"num/den"` in lowest terms.
    pub frequency: String,
    pub frequency_value: f64,
}

/// Frequency of good places `v <= p_max` with `v_l(ord_v P_i) = k_i` for all `i`.
pub fn probe_assumption1(
    points: &[GroupElement],
    l: u64,
    pattern: &[u32],
    p_max: u64,
) -> Result<Assumption1Report, LocalGlobalError> {
    if points.len() != pattern.len() {
        return Err(LocalGlobalError::BadArgument(format!(
            "pattern has {} entries for {} points",
            pattern.len(),
            points.len()
        )));
    }
    if !arith::is_prime(l) {
        return Err(LocalGlobalError::BadArgument(format!("{l} is not prime")));
    }
    let context = points.first().ok_or_else(|| LocalGlobalError::BadArgument("no points".into()))?.context();
    let places = context.good_places(2, p_max);
    let hits = places
        .par_iter()
        .map(|&p| -> Result<bool, LocalGlobalError> {
            let red = context.reduction(p)?;
            for (pt, &k) in points.iter().zip(pattern) {
                let ord = red.order_of(&red.image(pt)?);
                if arith::valuation(ord as i128, l)? != k {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<Vec<bool>, _>>()?;
    let matches = hits.iter().filter(|&&h| h).count();
    let fraction = if places.is_empty() { Ratio::new(0u64, 1) } else { Ratio::new(matches as u64, places.len() as u64) };
    Ok(Assumption1Report {
        l,
        pattern: pattern.to_vec(),
        p_max,
        matches,
        total: places.len(),
        frequency: format!("{}/{}", fraction.numer(), fraction.denom()),
        frequency_value: fraction.to_f64().unwrap_or(0.0),
    })
}

/// Good places `v <= p_max` where `B_tors -> B_v` fails to preserve orders.
pub fn probe_assumption2(context: &Arc<Context>, p_max: u64) -> Result<Vec<u64>, LocalGlobalError> {
    let torsion = context.torsion_subgroup()?;
    let places = context.good_places(2, p_max);
    let failing = places
        .par_iter()
        .map(|&p| -> Result<Option<u64>, LocalGlobalError> {
            let red = context.reduction(p)?;
            for (t, order) in &torsion.elements {
                if red.order_of(&red.image(t)?) != *order {
                    return Ok(Some(p));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(failing.into_iter().flatten().collect())
}
