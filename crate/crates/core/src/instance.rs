//! JSON instance files describing a group and one of its actions.
//!
//! ```json
//! {"group": {"degree": 3, "generators": ["(0 1)", "(0 1 2)"]}, "action": "natural"}
//! {"group": {"family": "cyclic", "n": 12}, "action": "regular"}
//! {"group": {"family": "quaternion8"},
//!  "action": {"coset": {"subgroup_generators": ["(0 4)(1 5)(2 6)(3 7)"]}}}
//! ```
//!
//! Families: `cyclic`, `dihedral`, `symmetric` (each with `n`),
//! `quaternion8`, and `product` with a `factors` list of families. Each
//! family is a permutation group; `natural` is its defining action and
//! subgroup generators are permutations of the same points.

use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::action::{coset_action, natural_action, regular_action, ActionError, GroupAction};
use crate::families;
use crate::group::{group_from_generators, subgroup_generated, FiniteGroup, GroupError, Permutation};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("invalid group: {0}")]
    Group(#[from] GroupError),
    #[error("invalid action: {0}")]
    Action(#[from] ActionError),
}

fn field(path: &str, message: impl Into<String>) -> InstanceError {
    InstanceError::Field {
        field: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Cyclic { n: usize },
    Dihedral { n: usize },
    Symmetric { n: usize },
    Quaternion8,
    Product { factors: Vec<FamilySpec> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Generators { degree: usize, generators: Vec<String> },
    Family(FamilySpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSpec {
    Natural,
    Regular,
    Coset { subgroup_generators: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceSpec {
    pub group: GroupSpec,
    pub action: ActionSpec,
}

/// A resolved instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub group: Arc<FiniteGroup>,
    pub action: GroupAction,
}

pub fn parse_instance(path: &Path) -> Result<InstanceSpec, InstanceError> {
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance_str(&text)
}

pub fn parse_instance_str(text: &str) -> Result<InstanceSpec, InstanceError> {
    let value: Value = serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = value.as_object().ok_or_else(|| field("$", "expected an object"))?;
    let group = parse_group(obj.get("group").ok_or_else(|| field("group", "missing"))?, "group")?;
    let action = parse_action(obj.get("action").ok_or_else(|| field("action", "missing"))?)?;
    let spec = InstanceSpec { group, action };
    resolve(&spec)?;
    Ok(spec)
}

fn get_usize(v: &Value, key: &str, path: &str) -> Result<usize, InstanceError> {
    let p = format!("{path}.{key}");
    v.get(key)
        .ok_or_else(|| field(&p, "missing"))?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| field(&p, "expected a nonnegative integer"))
}

fn get_strings(v: &Value, key: &str, path: &str) -> Result<Vec<String>, InstanceError> {
    let p = format!("{path}.{key}");
    let arr = v
        .get(key)
        .ok_or_else(|| field(&p, "missing"))?
        .as_array()
        .ok_or_else(|| field(&p, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, g)| match g {
            Value::String(s) => Ok(s.clone()),
            Value::Array(_) => Ok(g.to_string()),
            _ => Err(field(&format!("{p}[{i}]"), "expected a cycle string or image array")),
        })
        .collect()
}

fn parse_group(v: &Value, path: &str) -> Result<GroupSpec, InstanceError> {
    if v.get("family").is_some() {
        return Ok(GroupSpec::Family(parse_family(v, path)?));
    }
    let degree = get_usize(v, "degree", path)?;
    let generators = get_strings(v, "generators", path)?;
    Ok(GroupSpec::Generators { degree, generators })
}

fn parse_family(v: &Value, path: &str) -> Result<FamilySpec, InstanceError> {
    let p = format!("{path}.family");
    let name = v
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| field(&p, "expected a family name"))?;
    Ok(match name {
        "cyclic" => FamilySpec::Cyclic {
            n: get_usize(v, "n", path)?,
        },
        "dihedral" => FamilySpec::Dihedral {
            n: get_usize(v, "n", path)?,
        },
        "symmetric" => FamilySpec::Symmetric {
            n: get_usize(v, "n", path)?,
        },
        "quaternion8" => FamilySpec::Quaternion8,
        "product" => {
            let fp = format!("{path}.factors");
            let arr = v
                .get("factors")
                .and_then(Value::as_array)
                .ok_or_else(|| field(&fp, "expected an array of families"))?;
            if arr.is_empty() {
                return Err(field(&fp, "needs at least one factor"));
            }
            let factors = arr
                .iter()
                .enumerate()
                .map(|(i, f)| parse_family(f, &format!("{fp}[{i}]")))
                .collect::<Result<_, _>>()?;
            FamilySpec::Product { factors }
        }
        other => return Err(field(&p, format!("unknown family `{other}`"))),
    })
}

fn parse_action(v: &Value) -> Result<ActionSpec, InstanceError> {
    match v {
        Value::String(s) if s == "natural" => Ok(ActionSpec::Natural),
        Value::String(s) if s == "regular" => Ok(ActionSpec::Regular),
        Value::String(s) => Err(field("action", format!("unknown action `{s}`"))),
        Value::Object(o) => {
            let coset = o
                .get("coset")
                .ok_or_else(|| field("action", "expected `natural`, `regular` or {\"coset\": …}"))?;
            Ok(ActionSpec::Coset {
                subgroup_generators: get_strings(coset, "subgroup_generators", "action.coset")?,
            })
        }
        _ => Err(field("action", "expected a string or an object")),
    }
}

/// Degree and generators of a family, or a field error.
fn family_generators(f: &FamilySpec, path: &str) -> Result<(usize, Vec<Permutation>), InstanceError> {
    let positive = |n: usize| {
        if n == 0 {
            Err(field(&format!("{path}.n"), "must be positive"))
        } else {
            Ok(n)
        }
    };
    Ok(match f {
        FamilySpec::Cyclic { n } => (positive(*n)?, families::cyclic_generators(*n)),
        FamilySpec::Dihedral { n } => (
            *n,
            families::dihedral_generators(*n).map_err(|e| field(&format!("{path}.n"), e.to_string()))?,
        ),
        FamilySpec::Symmetric { n } => (positive(*n)?, families::symmetric_generators(*n)),
        FamilySpec::Quaternion8 => (8, families::quaternion_generators()),
        FamilySpec::Product { factors } => {
            let parts = factors
                .iter()
                .enumerate()
                .map(|(i, f)| family_generators(f, &format!("{path}.factors[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            families::product_generators(&parts)
        }
    })
}

/// Builds and validates the group and action of an instance.
pub fn resolve(spec: &InstanceSpec) -> Result<Instance, InstanceError> {
    let (degree, generators) = match &spec.group {
        GroupSpec::Generators { degree, generators } => {
            if *degree == 0 {
                return Err(field("group.degree", "must be positive"));
            }
            let gens = generators
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    Permutation::parse(s, *degree)
                        .map_err(|e| field(&format!("group.generators[{i}]"), e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (*degree, gens)
        }
        GroupSpec::Family(f) => family_generators(f, "group")?,
    };
    let group = Arc::new(group_from_generators(degree, &generators)?);
    let action = match &spec.action {
        ActionSpec::Natural => natural_action(group.clone())?,
        ActionSpec::Regular => regular_action(group.clone()),
        ActionSpec::Coset { subgroup_generators } => {
            let seeds = subgroup_generators
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let path = format!("action.coset.subgroup_generators[{i}]");
                    let p = Permutation::parse(s, degree).map_err(|e| field(&path, e.to_string()))?;
                    group
                        .index_of(&p)
                        .ok_or_else(|| field(&path, format!("{p} is not an element of the group")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let sub = subgroup_generated(&group, &seeds)?;
            coset_action(group.clone(), &sub)
        }
    };
    action.check_axioms()?;
    group.check_unit_axioms()?;
    Ok(Instance {
        spec: spec.clone(),
        group,
        action,
    })
}
