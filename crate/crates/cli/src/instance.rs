//! JSON instance files.

use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _, Result};
use hasse_mw::groups::{su_value, Context, Curve, ElementValue, GroupElement, SUnitContext};
use hasse_mw::localglobal::{Instance, DEFAULT_SEARCH_BOUND};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Sunits,
    Elliptic,
}

/// A JSON number or a decimal string (integer or `"num/den"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntText {
    Number(i64),
    Text(String),
}

/// A point: a rational (`"num/den"` or integer), an `[x, y]` pair, or `"infinity"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointText {
    Number(i64),
    Text(String),
    Pair(Vec<IntText>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub backend: Backend,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<u64>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<IntText>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<IntText>,
    pub points: Vec<PointText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_relations: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_bound: Option<u64>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().with_context(|| format!("bad rational {text:?}"))?;
    let den: BigInt = den.parse().with_context(|| format!("bad rational {text:?}"))?;
    if den.is_zero() {
        bail!("zero denominator in {text:?}");
    }
    Ok(BigRational::new(num, den))
}

/// `"num/den"` in lowest terms with positive denominator.
pub fn rational_text(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn int_value(v: &IntText, name: &str) -> Result<BigInt> {
    match v {
        IntText::Number(n) => Ok(BigInt::from(*n)),
        IntText::Text(s) => s.trim().parse().with_context(|| format!("{name} must be an integer, got {s:?}")),
    }
}

fn coordinate(v: &IntText) -> Result<BigRational> {
    match v {
        IntText::Number(n) => Ok(BigRational::from_integer((*n).into())),
        IntText::Text(s) => parse_rational(s),
    }
}

impl InstanceFile {
    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("malformed instance file {}", path.display()))
    }

    pub fn context(&self) -> Result<Arc<Context>> {
        if self.schema_version != SCHEMA_VERSION {
            bail!("unsupported schema_version {}", self.schema_version);
        }
        Ok(Arc::new(match self.backend {
            Backend::Sunits => {
                if self.a.is_some() || self.b.is_some() {
                    bail!("A and B belong to elliptic instances");
                }
                let s = self.s.clone().ok_or_else(|| anyhow!("sunits instance needs S"))?;
                Context::SUnits(SUnitContext::new(s)?)
            }
            Backend::Elliptic => {
                if self.s.is_some() {
                    bail!("S belongs to sunits instances");
                }
                let a = int_value(self.a.as_ref().ok_or_else(|| anyhow!("elliptic instance needs A"))?, "A")?;
                let b = int_value(self.b.as_ref().ok_or_else(|| anyhow!("elliptic instance needs B"))?, "B")?;
                Context::Elliptic(Curve::new(a, b)?)
            }
        }))
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let ctx = self.context()?;
        let points = self
            .points
            .iter()
            .map(|p| -> Result<GroupElement> {
                match (self.backend, p) {
                    (Backend::Sunits, PointText::Number(n)) => Ok(ctx.sunit(&BigRational::from_integer((*n).into()))?),
                    (Backend::Sunits, PointText::Text(s)) => Ok(ctx.sunit(&parse_rational(s)?)?),
                    (Backend::Elliptic, PointText::Text(s)) if s.trim() == "infinity" => Ok(ctx.identity()),
                    (Backend::Elliptic, PointText::Pair(xy)) if xy.len() == 2 => {
                        Ok(ctx.point(&coordinate(&xy[0])?, &coordinate(&xy[1])?)?)
                    }
                    (Backend::Sunits, _) => bail!("S-unit points are rationals, got {p:?}"),
                    (Backend::Elliptic, _) => bail!("curve points are [x, y] pairs or \"infinity\", got {p:?}"),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance::new(
            points,
            self.declared_relations.clone().unwrap_or_default(),
            self.search_bound.unwrap_or(DEFAULT_SEARCH_BOUND),
        )?)
    }

    /// Canonical file for an instance: rationals and big integers as strings.
    pub fn from_instance(instance: &Instance) -> Self {
        let (backend, s, a, b) = match &**instance.context() {
            Context::SUnits(ctx) => (Backend::Sunits, Some(ctx.primes().to_vec()), None, None),
            Context::Elliptic(curve) => (
                Backend::Elliptic,
                None,
                Some(IntText::Text(curve.a().to_string())),
                Some(IntText::Text(curve.b().to_string())),
            ),
        };
        let points = instance.points().iter().map(point_text).collect();
        let declared = instance.declared_relations();
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            backend,
            s,
            a,
            b,
            points,
            declared_relations: (!declared.is_empty()).then(|| declared.to_vec()),
            search_bound: Some(instance.search_bound()),
        }
    }
}

fn point_text(p: &GroupElement) -> PointText {
    match (&**p.context(), p.value()) {
        (Context::SUnits(ctx), ElementValue::SUnit(u)) => PointText::Text(rational_text(&su_value(ctx, u))),
        (_, ElementValue::Point(pt)) => match pt.affine() {
            None => PointText::Text("infinity".into()),
            Some((x, y)) => PointText::Pair(vec![
                IntText::Text(rational_text(&x)),
                IntText::Text(rational_text(&y)),
            ]),
        },
        _ => unreachable!("element kind matches its context"),
    }
}
