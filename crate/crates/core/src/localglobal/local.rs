use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use super::{Instance, LocalGlobalError};
use crate::arith;
use crate::groups::{GroupElement, LocalElem, LocalGroup, Reduction};

/// Residues `x_i` mod the search modulus and the global torsion element `T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalWitness {
    pub residues: Vec<u64>,
    pub torsion: GroupElement,
}

/// Solvability of `sum x_i^2 P_i = T` in `B_p` with `gcd(x, modulus) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalResult {
    pub place: u64,
    pub solvable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<LocalWitness>,
    /// `lcm` of the orders of the reduced points.
    pub modulus: u64,
}

/// Reduced instance data at one place.
pub(crate) struct LocalData {
    pub group: LocalGroup,
    pub group_order: u64,
    pub images: Vec<LocalElem>,
    pub orders: Vec<u64>,
    pub modulus: u64,
    /// Reduced torsion, paired with the global element.
    pub targets: Vec<(LocalElem, GroupElement)>,
}

impl LocalData {
    pub fn new(instance: &Instance, red: &Reduction) -> Result<Self, LocalGlobalError> {
        let images = instance.points().iter().map(|p| red.image(p)).collect::<Result<Vec<_>, _>>()?;
        let orders: Vec<u64> = images.iter().map(|e| red.order_of(e)).collect();
        let modulus = orders.iter().fold(1, |m, &o| m.lcm(&o));
        let mut targets = Vec::new();
        for (t, _) in &instance.torsion().elements {
            let img = red.image(t)?;
            if !targets.iter().any(|(e, _)| *e == img) {
                targets.push((img, t.clone()));
            }
        }
        targets.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(LocalData {
            group: red.group().clone(),
            group_order: red.group_order().value(),
            images,
            orders,
            modulus,
            targets,
        })
    }

    /// `sum x_i^2 g_i`.
    pub fn evaluate(&self, x: &[u64]) -> LocalElem {
        let m = self.modulus;
        x.iter().zip(&self.images).fold(self.group.identity(), |acc, (&xi, g)| {
            self.group.add(&acc, &self.group.mul(g, arith::mul_mod(xi % m, xi % m, m)))
        })
    }

    fn target(&self, e: &LocalElem) -> Option<&GroupElement> {
        self.targets.iter().find(|(t, _)| t == e).map(|(_, g)| g)
    }
}

fn check_place(instance: &Instance, p: u64) -> Result<(), LocalGlobalError> {
    if !(2..=3).contains(&instance.rank()) {
        return Err(LocalGlobalError::BadRank { expected: "2 or 3", got: instance.rank() });
    }
    if !instance.context().is_good_place(p) {
        return Err(LocalGlobalError::BadPlace(p));
    }
    Ok(())
}

/// Local solvability at a good place `p`.
///
/// `x_i^2 P_i` only depends on `x_i` mod `M = lcm ord_p(P_i)`, and a
/// residue vector with `gcd(x, M) = 1` lifts to coprime integers. The
/// search splits `B_p` into primary components: for each prime `q | M` the
/// `q`-parts are solved independently mod `q^{v_q(M)}` and glued by CRT.
pub fn local_solvable(instance: &Instance, p: u64) -> Result<LocalResult, LocalGlobalError> {
    check_place(instance, p)?;
    let red = instance.context().reduction(p)?;
    local_solvable_at(instance, &LocalData::new(instance, &red)?)
}

pub(crate) fn local_solvable_at(instance: &Instance, data: &LocalData) -> Result<LocalResult, LocalGlobalError> {
    let r = instance.rank();
    let m = data.modulus;
    let n = data.group_order;
    let mut parts: Vec<Vec<(u64, u64)>> = vec![Vec::new(); r];
    for (q, e) in arith::factorize(m)?.factors().iter().copied() {
        let qe = q.pow(e);
        let nq = q.pow(arith::valuation(n as i128, q)?);
        let (idem, _) = arith::crt(&[(1, nq), (0, n / nq)]);
        let Some(xs) = solve_primary(data, q, idem) else {
            return Ok(LocalResult { place: data.group.prime(), solvable: false, witness: None, modulus: m });
        };
        for (part, x) in parts.iter_mut().zip(xs) {
            part.push((x % qe, qe));
        }
    }
    let residues: Vec<u64> = parts.iter().map(|part| arith::crt(part).0).collect();
    let value = data.evaluate(&residues);
    let torsion = data.target(&value).cloned().ok_or_else(|| {
        LocalGlobalError::Inconsistent(format!("local witness {residues:?} misses the torsion at {}", data.group.prime()))
    })?;
    Ok(LocalResult {
        place: data.group.prime(),
        solvable: true,
        witness: Some(LocalWitness { residues, torsion }),
        modulus: m,
    })
}

#[derive(Default, Clone, Copy)]
struct Reps {
    unit: Option<u64>,
    any: Option<u64>,
}

/// Solve on the `q`-primary component, cut out by the idempotent `idem`.
fn solve_primary(data: &LocalData, q: u64, idem: u64) -> Option<Vec<u64>> {
    let g = &data.group;
    let comps: Vec<LocalElem> = data.images.iter().map(|e| g.mul(e, idem)).collect();
    let sizes: Vec<u64> = data.orders.iter().map(|&o| q.pow(arith::valuation(o as i128, q).unwrap())).collect();
    // a point with trivial q-part absorbs the coprimality condition
    if let Some(i) = sizes.iter().position(|&s| s == 1) {
        let mut x = vec![0; comps.len()];
        x[i] = 1;
        return Some(x);
    }
    let mut targets: Vec<LocalElem> = data.targets.iter().map(|(t, _)| g.mul(t, idem)).collect();
    targets.sort();
    targets.dedup();

    let tables: Vec<BTreeMap<LocalElem, Reps>> = comps
        .iter()
        .zip(&sizes)
        .map(|(c, &s)| {
            let mut table: BTreeMap<LocalElem, Reps> = BTreeMap::new();
            // x^2 c, stepping with (x + 1)^2 c = x^2 c + (2x + 1) c
            let (mut value, mut step, twice) = (g.identity(), *c, g.add(c, c));
            for x in 0..s {
                let entry = table.entry(value).or_default();
                if x % q != 0 && entry.unit.is_none() {
                    entry.unit = Some(x);
                }
                entry.any.get_or_insert(x);
                value = g.add(&value, &step);
                step = g.add(&step, &twice);
            }
            table
        })
        .collect();

    let mut reps = Vec::with_capacity(tables.len());
    search(g, &tables, &targets, g.identity(), &mut reps)
}

/// Depth-first over all but the last table; the last entry is looked up.
fn search(
    g: &LocalGroup,
    tables: &[BTreeMap<LocalElem, Reps>],
    targets: &[LocalElem],
    acc: LocalElem,
    reps: &mut Vec<Reps>,
) -> Option<Vec<u64>> {
    if reps.len() + 1 == tables.len() {
        let last = &tables[reps.len()];
        for t in targets {
            let Some(r_last) = last.get(&g.sub(t, &acc)) else { continue };
            if let Some(u) = r_last.unit {
                let mut x: Vec<u64> = reps.iter().map(|r| r.any.unwrap()).collect();
                x.push(u);
                return Some(x);
            }
            if let Some(i) = reps.iter().position(|r| r.unit.is_some()) {
                let mut x: Vec<u64> =
                    reps.iter().enumerate().map(|(j, r)| if j == i { r.unit } else { r.any }.unwrap()).collect();
                x.push(r_last.any.unwrap());
                return Some(x);
            }
        }
        return None;
    }
    for (v, r) in &tables[reps.len()] {
        reps.push(*r);
        let found = search(g, tables, targets, g.add(&acc, v), reps);
        reps.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Literal search over `[0, M)^r` with `gcd(x, M) = 1`. Exponential; a test oracle.
pub fn local_solvable_brute_force(instance: &Instance, p: u64) -> Result<bool, LocalGlobalError> {
    check_place(instance, p)?;
    let red = instance.context().reduction(p)?;
    let data = LocalData::new(instance, &red)?;
    let m = data.modulus;
    let r = instance.rank();
    let mut x = vec![0u64; r];
    loop {
        if x.iter().fold(m, |g, &xi| g.gcd(&xi)) == 1 && data.target(&data.evaluate(&x)).is_some() {
            return Ok(true);
        }
        let mut i = 0;
        while i < r {
            x[i] += 1;
            if x[i] < m {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == r {
            return Ok(false);
        }
    }
}
