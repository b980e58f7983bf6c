//! JSON structure format.
//!
//! ```json
//! {"kind":"hypergraph","b":2,"size":3,"edges":[[1,2],[2,3]]}
//! {"kind":"rel","signature":[{"arity":2,"name":"R"}],"size":2,"relations":{"R":[[2,1]]}}
//! ```
//!
//! Input may carry a `"universe"` array listing arbitrary labels (numbers or
//! strings) in increasing order; tuples then refer to labels and are
//! renumbered to `{1..n}`. Output never carries labels, and edges, tuples and
//! relation keys are sorted, so serializing gives canonical bytes.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{AnyStructure, Embedding, Hypergraph, OrderedStructure, Signature, StructureError};
use crate::canon;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("malformed structure JSON: {0}")]
    Malformed(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

fn malformed(msg: impl Into<String>) -> FormatError {
    FormatError::Malformed(msg.into())
}

pub fn parse_structure_str(text: &str) -> Result<AnyStructure, FormatError> {
    let value: Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    parse_structure(&value)
}

pub fn parse_structure(value: &Value) -> Result<AnyStructure, FormatError> {
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("structure must be a JSON object"))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("missing string field `kind`"))?;
    let labels = Labels::read(obj)?;
    match kind {
        "hypergraph" => {
            let b = get_usize(obj, "b")?;
            let size = labels.size;
            let edges = obj
                .get("edges")
                .and_then(Value::as_array)
                .ok_or_else(|| malformed("missing array field `edges`"))?
                .iter()
                .map(|e| labels.tuple(e))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AnyStructure::Hyper(Hypergraph::new(b, size, edges)?))
        }
        "rel" => {
            let sig = obj
                .get("signature")
                .and_then(Value::as_array)
                .ok_or_else(|| malformed("missing array field `signature`"))?;
            let mut symbols = Vec::with_capacity(sig.len());
            for entry in sig {
                let e = entry
                    .as_object()
                    .ok_or_else(|| malformed("signature entries are objects"))?;
                let name = e
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| malformed("signature entry without `name`"))?;
                symbols.push((name.to_string(), get_usize(e, "arity")?));
            }
            let signature = Signature::new(symbols)?;
            let rels = match obj.get("relations") {
                None => Map::new(),
                Some(Value::Object(m)) => m.clone(),
                Some(_) => return Err(malformed("`relations` must be an object")),
            };
            let mut relations = vec![BTreeSet::new(); signature.len()];
            for (name, tuples) in &rels {
                let idx = signature
                    .index_of(name)
                    .ok_or_else(|| StructureError::UnknownSymbol(name.clone()))?;
                let tuples = tuples
                    .as_array()
                    .ok_or_else(|| malformed(format!("relation `{name}` must be an array")))?;
                for t in tuples {
                    relations[idx].insert(labels.tuple(t)?);
                }
            }
            Ok(AnyStructure::Rel(OrderedStructure::new(
                signature,
                labels.size,
                relations,
            )?))
        }
        other => Err(malformed(format!("unknown kind `{other}`"))),
    }
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<usize, FormatError> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| malformed(format!("missing non-negative integer field `{key}`")))
}

struct Labels {
    size: usize,
    names: Option<Vec<Value>>,
}

impl Labels {
    fn read(obj: &Map<String, Value>) -> Result<Self, FormatError> {
        let names = match obj.get("universe") {
            None => None,
            Some(Value::Array(items)) => {
                for (i, item) in items.iter().enumerate() {
                    if !(item.is_string() || item.is_number()) {
                        return Err(malformed("universe labels are numbers or strings"));
                    }
                    if items[..i].contains(item) {
                        return Err(malformed(format!("duplicate universe label {item}")));
                    }
                }
                Some(items.clone())
            }
            Some(_) => return Err(malformed("`universe` must be an array")),
        };
        let size = match (&names, obj.get("size")) {
            (Some(n), None) => n.len(),
            (Some(n), Some(_)) => {
                let size = get_usize(obj, "size")?;
                if size != n.len() {
                    return Err(malformed("`size` disagrees with `universe`"));
                }
                size
            }
            (None, _) => get_usize(obj, "size")?,
        };
        Ok(Self { size, names })
    }

    fn tuple(&self, value: &Value) -> Result<Vec<usize>, FormatError> {
        let items = value
            .as_array()
            .ok_or_else(|| malformed("tuples and edges are arrays"))?;
        items.iter().map(|x| self.vertex(x)).collect()
    }

    fn vertex(&self, x: &Value) -> Result<usize, FormatError> {
        match &self.names {
            Some(names) => names
                .iter()
                .position(|n| n == x)
                .map(|p| p + 1)
                .ok_or_else(|| malformed(format!("unknown universe label {x}"))),
            None => x
                .as_u64()
                .map(|v| v as usize)
                .ok_or_else(|| malformed(format!("vertex {x} is not a positive integer"))),
        }
    }
}

pub fn hypergraph_to_value(h: &Hypergraph) -> Value {
    json!({
        "kind": "hypergraph",
        "b": h.uniformity(),
        "size": h.size(),
        "edges": h.edges().iter().collect::<Vec<_>>(),
    })
}

pub fn structure_to_value(s: &OrderedStructure) -> Value {
    let signature: Vec<Value> = s
        .signature()
        .symbols()
        .iter()
        .map(|(name, arity)| json!({"name": name, "arity": arity}))
        .collect();
    let mut relations = Map::new();
    for (i, (name, _)) in s.signature().symbols().iter().enumerate() {
        relations.insert(
            name.clone(),
            Value::from(
                s.relations()[i]
                    .iter()
                    .map(|t| Value::from(t.clone()))
                    .collect::<Vec<_>>(),
            ),
        );
    }
    json!({
        "kind": "rel",
        "signature": signature,
        "size": s.size(),
        "relations": relations,
    })
}

pub fn to_value(s: &AnyStructure) -> Value {
    match s {
        AnyStructure::Hyper(h) => hypergraph_to_value(h),
        AnyStructure::Rel(r) => structure_to_value(r),
    }
}

pub fn to_canonical_string(s: &AnyStructure) -> String {
    canon::to_canonical_string(&to_value(s))
}

/// SHA-256 of the canonical bytes.
pub fn structure_hash(s: &AnyStructure) -> String {
    canon::sha256_hex(to_canonical_string(s).as_bytes())
}

pub fn rel_hash(s: &OrderedStructure) -> String {
    canon::hash_value(&structure_to_value(s))
}

pub fn embedding_to_value(f: &Embedding) -> Value {
    json!({"map": f.map(), "codomain": f.codomain_size()})
}

pub fn embedding_from_value(v: &Value) -> Result<Embedding, FormatError> {
    let obj = v
        .as_object()
        .ok_or_else(|| malformed("embedding must be an object"))?;
    let map = obj
        .get("map")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("embedding without `map`"))?
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|v| v as usize)
                .ok_or_else(|| malformed("embedding images are integers"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let codomain = get_usize(obj, "codomain")?;
    Ok(Embedding::new(map, codomain)?)
}

pub fn rel_from_value(v: &Value) -> Result<OrderedStructure, FormatError> {
    match parse_structure(v)? {
        AnyStructure::Rel(s) => Ok(s),
        AnyStructure::Hyper(_) => Err(FormatError::Structure(StructureError::KindMismatch)),
    }
}

pub fn hypergraph_from_value(v: &Value) -> Result<Hypergraph, FormatError> {
    match parse_structure(v)? {
        AnyStructure::Hyper(h) => Ok(h),
        AnyStructure::Rel(_) => Err(FormatError::Structure(StructureError::KindMismatch)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hypergraph_canonical_bytes() {
        let s =
            parse_structure_str(r#"{"size":3,"kind":"hypergraph","edges":[[3,2],[1,2]],"b":2}"#)
                .unwrap();
        assert_eq!(
            to_canonical_string(&s),
            r#"{"b":2,"edges":[[1,2],[2,3]],"kind":"hypergraph","size":3}"#
        );
    }

    #[test]
    fn rel_canonical_bytes_and_labels() {
        let s = parse_structure_str(
            r#"{"kind":"rel","universe":["a","b"],"signature":[{"name":"R","arity":2}],
                "relations":{"R":[["b","a"]]}}"#,
        )
        .unwrap();
        assert_eq!(
            to_canonical_string(&s),
            r#"{"kind":"rel","relations":{"R":[[2,1]]},"signature":[{"arity":2,"name":"R"}],"size":2}"#
        );
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_structure_str("{").is_err());
        assert!(parse_structure_str(r#"{"kind":"graph","size":1}"#).is_err());
        assert!(
            parse_structure_str(r#"{"kind":"hypergraph","b":2,"size":2,"edges":[[1,3]]}"#).is_err()
        );
        assert!(parse_structure_str(
            r#"{"kind":"rel","size":2,"signature":[],"relations":{"R":[[1,2]]}}"#
        )
        .is_err());
    }

    fn arb_structure() -> impl Strategy<Value = OrderedStructure> {
        (1usize..=4).prop_flat_map(|n| {
            let tuple2 = proptest::collection::vec(1..=n, 2);
            let tuple1 = proptest::collection::vec(1..=n, 1);
            (
                Just(n),
                proptest::collection::btree_set(tuple2, 0..6),
                proptest::collection::btree_set(tuple1, 0..3),
            )
                .prop_map(|(n, r, s)| {
                    let sig = Signature::new([("R", 2), ("S", 1)]).unwrap();
                    OrderedStructure::new(sig, n, vec![r, s]).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn reparse_gives_identical_bytes(s in arb_structure()) {
            let any = AnyStructure::Rel(s);
            let text = to_canonical_string(&any);
            let back = parse_structure_str(&text).unwrap();
            prop_assert_eq!(&back, &any);
            prop_assert_eq!(to_canonical_string(&back), text);
        }
    }
}
