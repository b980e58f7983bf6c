//! Finite linearly ordered relational structures and uniform hypergraphs.
//!
//! Universes are always `{1..n}` with the natural order of the integers, so
//! the order relation is implicit and never stored as a relation. Relation
//! tuples and hyperedges use 1-based vertex numbers.

mod embed;
mod hypergraph;
pub mod json;
mod setorder;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use embed::{
    check_embedding, enumerate_embeddings, first_embedding, EmbeddingCheck, Relational,
};
pub use hypergraph::{downsets, gr_target_hypergraph, TargetHypergraph};
pub use setorder::{compare_sets, SetOrder};

#[doc(hidden)]
pub use setorder::compare_sets_traced;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("structures of different kinds")]
    KindMismatch,
    #[error("structures have different signatures")]
    SignatureMismatch,
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("tuple {tuple:?} of `{symbol}` is malformed for a universe of size {size}")]
    BadTuple {
        symbol: String,
        tuple: Vec<usize>,
        size: usize,
    },
    #[error("hyperedge {0:?} is not a {1}-subset of the universe")]
    BadEdge(Vec<usize>, usize),
    #[error("hypergraph uniformity must be at least 2, got {0}")]
    UniformityTooSmall(usize),
    #[error("structure is not absolutely ordered")]
    NotAbsolutelyOrdered,
    #[error("expected a structure with exactly one relation symbol")]
    NotSingleRelation,
    #[error("{count} items exceed the enumeration cap of {cap}")]
    SizeLimitExceeded { count: u128, cap: usize },
}

/// A finite relational signature: symbol names with positive arities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let symbols: Vec<(String, usize)> =
            symbols.into_iter().map(|(s, a)| (s.into(), a)).collect();
        for (i, (name, arity)) in symbols.iter().enumerate() {
            if name.is_empty() {
                return Err(StructureError::InvalidSignature("empty symbol name".into()));
            }
            if *arity == 0 {
                return Err(StructureError::InvalidSignature(format!(
                    "`{name}` has arity 0"
                )));
            }
            if symbols[..i].iter().any(|(n, _)| n == name) {
                return Err(StructureError::InvalidSignature(format!(
                    "duplicate symbol `{name}`"
                )));
            }
        }
        Ok(Self { symbols })
    }

    pub fn empty() -> Self {
        Self {
            symbols: Vec::new(),
        }
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn arity(&self, idx: usize) -> usize {
        self.symbols[idx].1
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.symbols[idx].0
    }
}

pub type Tuple = Vec<usize>;

/// A linearly ordered structure on `{1..size}`; `relations[i]` interprets
/// the i-th symbol of the signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderedStructure {
    signature: Signature,
    size: usize,
    relations: Vec<BTreeSet<Tuple>>,
}

impl OrderedStructure {
    pub fn new(
        signature: Signature,
        size: usize,
        relations: Vec<BTreeSet<Tuple>>,
    ) -> Result<Self, StructureError> {
        if relations.len() != signature.len() {
            return Err(StructureError::SignatureMismatch);
        }
        for (idx, rel) in relations.iter().enumerate() {
            let arity = signature.arity(idx);
            for t in rel {
                if t.len() != arity || t.iter().any(|&x| x == 0 || x > size) {
                    return Err(StructureError::BadTuple {
                        symbol: signature.name(idx).to_string(),
                        tuple: t.clone(),
                        size,
                    });
                }
            }
        }
        Ok(Self {
            signature,
            size,
            relations,
        })
    }

    /// Builds a structure from `(symbol, tuples)` pairs; omitted symbols are empty.
    pub fn from_tuples<'a, I>(
        signature: Signature,
        size: usize,
        tuples: I,
    ) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (&'a str, Vec<Tuple>)>,
    {
        let mut relations = vec![BTreeSet::new(); signature.len()];
        for (name, ts) in tuples {
            let idx = signature
                .index_of(name)
                .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
            relations[idx].extend(ts);
        }
        Self::new(signature, size, relations)
    }

    /// The bare chain `{1..size}` over the empty signature.
    pub fn chain(size: usize) -> Self {
        Self {
            signature: Signature::empty(),
            size,
            relations: Vec::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relations(&self) -> &[BTreeSet<Tuple>] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&BTreeSet<Tuple>> {
        self.signature.index_of(name).map(|i| &self.relations[i])
    }

    /// Every tuple of every relation is strictly increasing.
    pub fn is_absolutely_ordered(&self) -> bool {
        self.relations
            .iter()
            .flatten()
            .all(|t| t.windows(2).all(|p| p[0] < p[1]))
    }

    /// Restriction to the symbols of `sub`, which must occur in this signature
    /// with the same arities.
    pub fn reduct(&self, sub: &Signature) -> Result<Self, StructureError> {
        let mut relations = Vec::with_capacity(sub.len());
        for (name, arity) in sub.symbols() {
            let idx = self
                .signature
                .index_of(name)
                .ok_or_else(|| StructureError::UnknownSymbol(name.clone()))?;
            if self.signature.arity(idx) != *arity {
                return Err(StructureError::SignatureMismatch);
            }
            relations.push(self.relations[idx].clone());
        }
        Ok(Self {
            signature: sub.clone(),
            size: self.size,
            relations,
        })
    }

    /// Single-relation structure for symbol index `idx`.
    pub fn component(&self, idx: usize) -> Self {
        let (name, arity) = &self.signature.symbols[idx];
        Self {
            signature: Signature {
                symbols: vec![(name.clone(), *arity)],
            },
            size: self.size,
            relations: vec![self.relations[idx].clone()],
        }
    }

    /// Induced substructure on the sorted vertex list `vertices`, renumbered.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut pos = vec![0usize; self.size + 1];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i + 1;
        }
        let relations = self
            .relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter(|t| t.iter().all(|&x| pos[x] != 0))
                    .map(|t| t.iter().map(|&x| pos[x]).collect())
                    .collect()
            })
            .collect();
        Self {
            signature: self.signature.clone(),
            size: vertices.len(),
            relations,
        }
    }
}

/// A linearly ordered `b`-uniform hypergraph on `{1..size}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypergraph {
    uniformity: usize,
    size: usize,
    edges: BTreeSet<Tuple>,
}

impl Hypergraph {
    /// Edges may be given in any vertex order; they are stored sorted.
    pub fn new<I>(uniformity: usize, size: usize, edges: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = Tuple>,
    {
        if uniformity < 2 {
            return Err(StructureError::UniformityTooSmall(uniformity));
        }
        let mut set = BTreeSet::new();
        for mut e in edges {
            e.sort_unstable();
            let distinct = e.windows(2).all(|p| p[0] < p[1]);
            if e.len() != uniformity || !distinct || e.iter().any(|&x| x == 0 || x > size) {
                return Err(StructureError::BadEdge(e, uniformity));
            }
            set.insert(e);
        }
        Ok(Self {
            uniformity,
            size,
            edges: set,
        })
    }

    pub fn edgeless(uniformity: usize, size: usize) -> Result<Self, StructureError> {
        Self::new(uniformity, size, [])
    }

    pub fn uniformity(&self) -> usize {
        self.uniformity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn edges(&self) -> &BTreeSet<Tuple> {
        &self.edges
    }

    pub fn has_edge(&self, sorted: &[usize]) -> bool {
        self.edges.contains(sorted)
    }

    /// The single-relation structure with one `b`-ary symbol `name`; each edge
    /// becomes its increasing tuple.
    pub fn to_structure_named(&self, name: &str) -> OrderedStructure {
        OrderedStructure {
            signature: Signature {
                symbols: vec![(name.to_string(), self.uniformity)],
            },
            size: self.size,
            relations: vec![self.edges.clone()],
        }
    }

    pub fn to_structure(&self) -> OrderedStructure {
        self.to_structure_named("R")
    }

    /// Inverse of [`Hypergraph::to_structure`]; requires one absolutely
    /// ordered relation of arity at least 2.
    pub fn from_structure(s: &OrderedStructure) -> Result<Self, StructureError> {
        if s.signature.len() != 1 {
            return Err(StructureError::NotSingleRelation);
        }
        if !s.is_absolutely_ordered() {
            return Err(StructureError::NotAbsolutelyOrdered);
        }
        let arity = s.signature.arity(0);
        if arity < 2 {
            return Err(StructureError::UniformityTooSmall(arity));
        }
        Ok(Self {
            uniformity: arity,
            size: s.size,
            edges: s.relations[0].clone(),
        })
    }
}

pub fn hypergraph_to_structure(h: &Hypergraph) -> OrderedStructure {
    h.to_structure()
}

pub fn structure_to_hypergraph(s: &OrderedStructure) -> Result<Hypergraph, StructureError> {
    Hypergraph::from_structure(s)
}

/// An order embedding `{1..len} -> {1..codomain}` stored as its 1-based images.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    map: Vec<usize>,
    codomain: usize,
}

impl Embedding {
    /// Any map with images in range; order and relations are checked by
    /// [`check_embedding`], not here.
    pub fn new(map: Vec<usize>, codomain: usize) -> Result<Self, StructureError> {
        if map.iter().any(|&x| x == 0 || x > codomain) {
            return Err(StructureError::BadTuple {
                symbol: "map".into(),
                tuple: map,
                size: codomain,
            });
        }
        Ok(Self { map, codomain })
    }

    pub fn identity(size: usize) -> Self {
        Self {
            map: (1..=size).collect(),
            codomain: size,
        }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn domain_size(&self) -> usize {
        self.map.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain
    }

    /// Image of 1-based vertex `v`.
    pub fn apply(&self, v: usize) -> usize {
        self.map[v - 1]
    }

    /// `self ∘ inner`, or `None` when the sizes do not line up.
    pub fn after(&self, inner: &Embedding) -> Option<Embedding> {
        if inner.codomain != self.map.len() {
            return None;
        }
        Some(Embedding {
            map: inner.map.iter().map(|&v| self.map[v - 1]).collect(),
            codomain: self.codomain,
        })
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.map.windows(2).all(|p| p[0] < p[1])
    }

    /// Preimage of a vertex set, as a sorted list of domain vertices.
    pub fn preimage(&self, set: &[usize]) -> Vec<usize> {
        (1..=self.map.len())
            .filter(|&v| set.contains(&self.map[v - 1]))
            .collect()
    }

    /// Big-endian images; byte order equals lexicographic order on maps.
    pub fn encode(&self) -> Vec<u8> {
        self.map
            .iter()
            .flat_map(|&v| (v as u32).to_be_bytes())
            .collect()
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}↦{}", i + 1, v)?;
        }
        f.write_str("}")
    }
}

/// A structure of either kind, as read from the JSON format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyStructure {
    Hyper(Hypergraph),
    Rel(OrderedStructure),
}

impl AnyStructure {
    pub fn size(&self) -> usize {
        match self {
            AnyStructure::Hyper(h) => h.size(),
            AnyStructure::Rel(s) => s.size(),
        }
    }

    pub fn is_embedding(
        &self,
        target: &AnyStructure,
        f: &Embedding,
    ) -> Result<bool, StructureError> {
        match (self, target) {
            (AnyStructure::Hyper(a), AnyStructure::Hyper(b)) => {
                if a.uniformity() != b.uniformity() {
                    return Err(StructureError::SignatureMismatch);
                }
                Ok(is_hyper_embedding(a, b, f))
            }
            (AnyStructure::Rel(a), AnyStructure::Rel(b)) => is_embedding(a, b, f),
            _ => Err(StructureError::KindMismatch),
        }
    }
}

/// Injective, strictly increasing, and relation preserving and reflecting.
pub fn is_embedding(
    a: &OrderedStructure,
    b: &OrderedStructure,
    f: &Embedding,
) -> Result<bool, StructureError> {
    if a.signature != b.signature {
        return Err(StructureError::SignatureMismatch);
    }
    Ok(embed::check_structure_embedding(a, b, f).holds())
}

pub fn is_hyper_embedding(a: &Hypergraph, b: &Hypergraph, f: &Embedding) -> bool {
    check_embedding(a, b, f).holds()
}
