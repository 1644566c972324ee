//! JSON instance files.
//!
//! ```text
//! group:          {"kind": "group", "order": n, "mul": [[..], ..]}
//! partial_action: {"kind": "partial_action", "group": G, "space_size": m,
//!                  "graphs": {"<g>": [[x, y], ..], ..}, "labels": [..]}
//! global_action:  {"kind": "global_action", "group": G, "space_size": m,
//!                  "perm": {"<g>": [y0, y1, ..], ..}, "labels": [..]}
//! ```
//!
//! `G` is either a built-in name (`"Z4"`, `"S3"`, `"D4"`, `"Q8"`, `"V4"`,
//! products like `"Z2xZ4"`) or a group object. `graphs` and `perm` may also
//! be arrays indexed by element; missing graph keys mean empty graphs.
//! `kind` may be omitted when the payload is unambiguous, `name` and `labels`
//! are optional. Bernoulli points carry labels listing `ω(g)` for the group
//! elements in index order, identity first.
//!
//! Output always uses the object forms above; keys come out sorted.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::action::{ActionError, GlobalAction, PartialAction};
use crate::group::{FiniteGroup, GroupError};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Action(#[from] ActionError),
}

fn schema(path: &str, message: impl Into<String>) -> InstanceError {
    InstanceError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Group(FiniteGroup),
    PartialAction(PartialAction),
    GlobalAction(GlobalAction),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::Group(_) => "group",
            Body::PartialAction(_) => "partial_action",
            Body::GlobalAction(_) => "global_action",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceFile {
    pub name: Option<String>,
    pub body: Body,
}

impl InstanceFile {
    pub fn new(body: Body) -> Self {
        Self { name: None, body }
    }

    pub fn named(name: impl Into<String>, body: Body) -> Self {
        Self {
            name: Some(name.into()),
            body,
        }
    }

    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self, InstanceError> {
        if let Value::String(name) = value {
            return Ok(Self::named(name.clone(), Body::Group(FiniteGroup::by_name(name)?)));
        }
        let obj = value.as_object().ok_or_else(|| schema("$", "expected an object"))?;
        let name = match obj.get("name") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(schema("$.name", "expected a string")),
        };
        let kind = match obj.get("kind") {
            Some(Value::String(k)) => k.clone(),
            Some(_) => return Err(schema("$.kind", "expected a string")),
            None if obj.contains_key("graphs") => "partial_action".into(),
            None if obj.contains_key("perm") => "global_action".into(),
            None if obj.contains_key("mul") => "group".into(),
            None => return Err(schema("$.kind", "missing and not inferable")),
        };
        let body = match kind.as_str() {
            "group" => Body::Group(parse_group(value, "$")?),
            "partial_action" => Body::PartialAction(parse_partial_action(obj)?),
            "global_action" => Body::GlobalAction(parse_global_action(obj)?),
            other => return Err(schema("$.kind", format!("unknown kind {other:?}"))),
        };
        Ok(Self { name, body })
    }

    pub fn to_value(&self) -> Value {
        let mut value = match &self.body {
            Body::Group(g) => group_value(g),
            Body::PartialAction(pa) => partial_action_value(pa),
            Body::GlobalAction(ga) => global_action_value(ga),
        };
        let obj = value.as_object_mut().expect("bodies serialize to objects");
        obj.insert("kind".into(), json!(self.body.kind()));
        if let Some(name) = &self.name {
            obj.insert("name".into(), json!(name));
        }
        value
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("values serialize")
    }
}

fn as_index(value: &Value, path: &str) -> Result<usize, InstanceError> {
    value
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn as_array<'a>(value: &'a Value, path: &str) -> Result<&'a Vec<Value>, InstanceError> {
    value.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, InstanceError> {
    obj.get(key).ok_or_else(|| schema(&format!("$.{key}"), "missing"))
}

pub fn parse_group(value: &Value, path: &str) -> Result<FiniteGroup, InstanceError> {
    match value {
        Value::String(name) => Ok(FiniteGroup::by_name(name)?),
        Value::Array(_) => Ok(FiniteGroup::from_table(&parse_table(value, path)?)?),
        Value::Object(obj) => {
            let mul = obj.get("mul").ok_or_else(|| schema(&format!("{path}.mul"), "missing"))?;
            let table = parse_table(mul, &format!("{path}.mul"))?;
            if let Some(order) = obj.get("order") {
                let order = as_index(order, &format!("{path}.order"))?;
                if order != table.len() {
                    return Err(schema(&format!("{path}.order"), "does not match the table"));
                }
            }
            Ok(FiniteGroup::from_table(&table)?)
        }
        _ => Err(schema(path, "expected a group name or object")),
    }
}

fn parse_table(value: &Value, path: &str) -> Result<Vec<Vec<usize>>, InstanceError> {
    as_array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let row_path = format!("{path}[{i}]");
            as_array(row, &row_path)?
                .iter()
                .enumerate()
                .map(|(j, v)| as_index(v, &format!("{row_path}[{j}]")))
                .collect()
        })
        .collect()
}

/// Per-element entries from `{"<g>": v}` or `[v0, v1, ..]`.
fn per_element<'a>(value: &'a Value, order: usize, path: &str) -> Result<Vec<Option<&'a Value>>, InstanceError> {
    let mut out = vec![None; order];
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                let g: usize = key
                    .parse()
                    .map_err(|_| schema(&format!("{path}.{key}"), "key is not an element index"))?;
                if g >= order {
                    return Err(schema(&format!("{path}.{key}"), "element out of range"));
                }
                out[g] = Some(v);
            }
        }
        Value::Array(items) => {
            if items.len() != order {
                return Err(schema(path, format!("expected {order} entries")));
            }
            for (g, v) in items.iter().enumerate() {
                out[g] = Some(v);
            }
        }
        _ => return Err(schema(path, "expected an object or array")),
    }
    Ok(out)
}

fn parse_labels(obj: &Map<String, Value>) -> Result<Option<Vec<String>>, InstanceError> {
    match obj.get("labels") {
        None | Some(Value::Null) => Ok(None),
        Some(v) => as_array(v, "$.labels")?
            .iter()
            .map(|l| match l {
                Value::String(s) => Ok(s.clone()),
                other => Ok(other.to_string()),
            })
            .collect::<Result<Vec<_>, InstanceError>>()
            .map(Some),
    }
}

fn parse_partial_action(obj: &Map<String, Value>) -> Result<PartialAction, InstanceError> {
    let group = parse_group(field(obj, "group")?, "$.group")?;
    let m = as_index(field(obj, "space_size")?, "$.space_size")?;
    let entries = per_element(field(obj, "graphs")?, group.order(), "$.graphs")?;
    let mut graphs = Vec::with_capacity(group.order());
    for (g, entry) in entries.into_iter().enumerate() {
        let path = format!("$.graphs.{g}");
        let graph = match entry {
            None => Vec::new(),
            Some(v) => as_array(v, &path)?
                .iter()
                .enumerate()
                .map(|(i, pair)| {
                    let pair_path = format!("{path}[{i}]");
                    match as_array(pair, &pair_path)?.as_slice() {
                        [x, y] => Ok((as_index(x, &pair_path)?, as_index(y, &pair_path)?)),
                        _ => Err(schema(&pair_path, "expected a pair [x, y]")),
                    }
                })
                .collect::<Result<Vec<_>, InstanceError>>()?,
        };
        graphs.push(graph);
    }
    let pa = PartialAction::new(group, m, graphs)?;
    Ok(match parse_labels(obj)? {
        Some(labels) => pa.with_labels(labels)?,
        None => pa,
    })
}

fn parse_global_action(obj: &Map<String, Value>) -> Result<GlobalAction, InstanceError> {
    let group = parse_group(field(obj, "group")?, "$.group")?;
    let m = as_index(field(obj, "space_size")?, "$.space_size")?;
    let entries = per_element(field(obj, "perm")?, group.order(), "$.perm")?;
    let mut perm = Vec::with_capacity(group.order());
    for (g, entry) in entries.into_iter().enumerate() {
        let path = format!("$.perm.{g}");
        let v = entry.ok_or_else(|| schema(&path, "missing permutation"))?;
        let p = as_array(v, &path)?
            .iter()
            .map(|y| as_index(y, &path))
            .collect::<Result<Vec<_>, InstanceError>>()?;
        perm.push(p);
    }
    let ga = GlobalAction::new(group, m, perm)?;
    Ok(match parse_labels(obj)? {
        Some(labels) => ga.with_labels(labels)?,
        None => ga,
    })
}

pub fn group_value(group: &FiniteGroup) -> Value {
    json!({ "order": group.order(), "mul": group.table() })
}

pub fn partial_action_value(pa: &PartialAction) -> Value {
    let graphs: Map<String, Value> = pa
        .graphs()
        .iter()
        .enumerate()
        .map(|(g, graph)| (g.to_string(), json!(graph.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>())))
        .collect();
    let mut value = json!({
        "group": group_value(pa.group()),
        "space_size": pa.space_size(),
        "graphs": graphs,
    });
    if let Some(labels) = pa.labels() {
        value["labels"] = json!(labels);
    }
    value
}

pub fn global_action_value(ga: &GlobalAction) -> Value {
    let perm: Map<String, Value> = ga
        .perms()
        .iter()
        .enumerate()
        .map(|(g, p)| (g.to_string(), json!(p)))
        .collect();
    let mut value = json!({
        "group": group_value(ga.group()),
        "space_size": ga.space_size(),
        "perm": perm,
    });
    if let Some(labels) = ga.labels() {
        value["labels"] = json!(labels);
    }
    value
}
