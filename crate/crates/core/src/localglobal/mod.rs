//! Local and global solvability of `x_1^2 P_1 + ... + x_r^2 P_r = T`.
//!
//! Here the `P_i` are points of infinite order in a Mordell-Weil type group,
//! the `x_i` are coprime integers and `T` is torsion. Rank 2 and 3 are
//! decided exactly through the relation lattice of the points; rank 4 and
//! above are handled by the counterexample generator in [`special`].

mod global;
mod local;
mod scan;
mod special;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::arith::ArithError;
use crate::groups::{self, Context, GroupElement, GroupError, RelationLattice, TorsionSubgroup};
use crate::qforms::FormError;

pub use global::{global_decide, global_decide_rank2, global_decide_rank3, GlobalDecision, Status, UnsolvableReason};
pub use local::{local_solvable, local_solvable_brute_force, LocalResult, LocalWitness};
pub use scan::{scan, scan_with_jobs, ExcludedPlace, ScanReport, Verdict};
pub use special::{
    counterexample_rank_n, positive_definite_check, probe_assumption1, probe_assumption2, Assumption1Report,
    Counterexample, PositiveDefiniteReport,
};

pub const DEFAULT_SEARCH_BOUND: u64 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalGlobalError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("expected {expected} points, got {got}")]
    BadRank { expected: &'static str, got: usize },
    #[error("{0} is not a good place for this instance")]
    BadPlace(u64),
    #[error("invalid argument: {0}")]
    BadArgument(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Points of infinite order, with optional known relations.
#[derive(Debug, Clone, Serialize)]
pub struct Instance {
    #[serde(flatten)]
    context: Arc<Context>,
    points: Vec<GroupElement>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    declared_relations: Vec<Vec<i64>>,
    search_bound: u64,
    #[serde(skip)]
    torsion: TorsionSubgroup,
}

impl Instance {
    pub fn new(
        points: Vec<GroupElement>,
        declared_relations: Vec<Vec<i64>>,
        search_bound: u64,
    ) -> Result<Self, LocalGlobalError> {
        let Some(first) = points.first() else {
            return Err(LocalGlobalError::InvalidInstance("no points".into()));
        };
        if points.len() > 3 {
            return Err(LocalGlobalError::BadRank { expected: "1 to 3", got: points.len() });
        }
        if search_bound == 0 {
            return Err(LocalGlobalError::InvalidInstance("search bound must be positive".into()));
        }
        let context = first.context().clone();
        if points.iter().any(|p| **p.context() != *context) {
            return Err(GroupError::ContextMismatch.into());
        }
        if let Some(p) = points.iter().find(|p| p.is_torsion()) {
            return Err(LocalGlobalError::InvalidInstance(format!("point {p} has finite order")));
        }
        let torsion = context.torsion_subgroup()?;
        for rel in &declared_relations {
            if rel.len() != points.len() {
                return Err(LocalGlobalError::InvalidInstance(format!(
                    "declared relation {rel:?} has {} entries for {} points",
                    rel.len(),
                    points.len()
                )));
            }
            if !torsion.contains(&groups::linear_combination(rel, &points)?) {
                return Err(LocalGlobalError::InvalidInstance(format!("declared relation {rel:?} does not hold")));
            }
        }
        Ok(Instance { context, points, declared_relations, search_bound, torsion })
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.context
    }

    pub fn points(&self) -> &[GroupElement] {
        &self.points
    }

    pub fn declared_relations(&self) -> &[Vec<i64>] {
        &self.declared_relations
    }

    pub fn search_bound(&self) -> u64 {
        self.search_bound
    }

    pub fn torsion(&self) -> &TorsionSubgroup {
        &self.torsion
    }

    pub fn rank(&self) -> usize {
        self.points.len()
    }

    /// Good places that also do not divide `#B_tors`.
    pub fn is_scan_place(&self, p: u64) -> bool {
        self.context.is_good_place(p) && self.torsion.order() % p != 0
    }

    /// Relation lattice of the points, with declared relations merged in.
    pub fn relation_lattice(&self) -> Result<RelationLattice, LocalGlobalError> {
        let mut lattice = groups::relation_lattice(&self.points, self.search_bound)?;
        if !self.declared_relations.is_empty() {
            let m = self.rank();
            let rows: Vec<Vec<i128>> = lattice
                .basis
                .iter()
                .chain(&self.declared_relations)
                .map(|r| r.iter().map(|&x| x as i128).collect())
                .collect();
            lattice.basis = groups::saturate(&rows, m)
                .into_iter()
                .map(|r| r.into_iter().map(i64::try_from).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()
                .map_err(|_| LocalGlobalError::Inconsistent("relation coefficient overflow".into()))?;
            // non-torsion points bound the rank by m - 1
            lattice.certified |= lattice.basis.len() + 1 == m;
        }
        Ok(lattice)
    }
}
