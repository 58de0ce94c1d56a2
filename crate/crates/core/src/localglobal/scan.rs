use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::global::{global_decide, GlobalDecision, Status};
use super::local::{local_solvable_at, LocalData, LocalResult};
use super::{Instance, LocalGlobalError};
use crate::arith;
use crate::groups::{Context, GroupError, POINT_COUNT_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    /// Global solution exists yet these good places fail locally.
    Violation { places: Vec<u64> },
    /// Independence was not certified, so no verdict is asserted.
    NotAsserted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExcludedPlace {
    pub place: u64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub instance: Instance,
    pub p_min: u64,
    pub p_max: u64,
    pub global: GlobalDecision,
    pub places_scanned: usize,
    pub failing_places: Vec<u64>,
    /// `"num/den"` in lowest terms.
    pub failing_fraction: String,
    pub failing_fraction_value: f64,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub excluded_places: Vec<ExcludedPlace>,
    pub per_prime: Vec<LocalResult>,
}

pub fn scan(instance: &Instance, p_max: u64, p_min: u64) -> Result<ScanReport, LocalGlobalError> {
    scan_with_jobs(instance, p_max, p_min, 1)
}

/// Scan on `jobs` worker threads. The report does not depend on `jobs`.
pub fn scan_with_jobs(instance: &Instance, p_max: u64, p_min: u64, jobs: usize) -> Result<ScanReport, LocalGlobalError> {
    if p_min > p_max {
        return Err(LocalGlobalError::BadArgument(format!("p_min {p_min} exceeds p_max {p_max}")));
    }
    if !(2..=3).contains(&instance.rank()) {
        return Err(LocalGlobalError::BadRank { expected: "2 or 3", got: instance.rank() });
    }
    if matches!(**instance.context(), Context::Elliptic(_)) && p_max > POINT_COUNT_CAP {
        return Err(GroupError::PrimeTooLarge { p: p_max, cap: POINT_COUNT_CAP }.into());
    }
    let mut places = Vec::new();
    let mut excluded_places = Vec::new();
    for p in p_min..=p_max {
        if !arith::is_prime(p) {
            continue;
        }
        if !instance.context().is_good_place(p) {
            excluded_places.push(ExcludedPlace { place: p, reason: "bad place" });
        } else if !instance.is_scan_place(p) {
            excluded_places.push(ExcludedPlace { place: p, reason: "divides torsion order" });
        } else {
            places.push(p);
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| LocalGlobalError::BadArgument(format!("thread pool: {e}")))?;
    let (global, per_prime) = pool.install(|| {
        rayon::join(
            || global_decide(instance),
            || {
                places
                    .par_iter()
                    .map(|&p| {
                        let red = instance.context().reduction(p)?;
                        local_solvable_at(instance, &LocalData::new(instance, &red)?)
                    })
                    .collect::<Result<Vec<_>, _>>()
            },
        )
    });
    let (global, per_prime) = (global?, per_prime?);

    let failing_places: Vec<u64> = per_prime.iter().filter(|r| !r.solvable).map(|r| r.place).collect();
    let fraction = if places.is_empty() {
        Ratio::new(0u64, 1)
    } else {
        Ratio::new(failing_places.len() as u64, places.len() as u64)
    };
    let verdict = match global.status {
        Status::Solvable { .. } if !failing_places.is_empty() => Verdict::Violation { places: failing_places.clone() },
        Status::IndependentUncertified => Verdict::NotAsserted,
        _ => Verdict::Consistent,
    };
    Ok(ScanReport {
        instance: instance.clone(),
        p_min,
        p_max,
        global,
        places_scanned: places.len(),
        failing_places,
        failing_fraction: format!("{}/{}", fraction.numer(), fraction.denom()),
        failing_fraction_value: fraction.to_f64().unwrap_or(0.0),
        verdict,
        excluded_places,
        per_prime,
    })
}
