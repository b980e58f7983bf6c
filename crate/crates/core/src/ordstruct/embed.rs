use std::collections::BTreeSet;

use super::{Embedding, Hypergraph, OrderedStructure, StructureError, Tuple};

/// Shared view of hypergraphs and relational structures as ordered
/// universes carrying tuple relations.
pub trait Relational {
    fn universe_size(&self) -> usize;
    fn relation_sets(&self) -> Vec<&BTreeSet<Tuple>>;
    /// Same signature (or same uniformity).
    fn same_type(&self, other: &Self) -> bool;
    /// Tuples are sets (hypergraph edges) rather than sequences.
    fn unordered_tuples(&self) -> bool {
        false
    }
}

impl Relational for Hypergraph {
    fn universe_size(&self) -> usize {
        self.size()
    }

    fn relation_sets(&self) -> Vec<&BTreeSet<Tuple>> {
        vec![self.edges()]
    }

    fn same_type(&self, other: &Self) -> bool {
        self.uniformity() == other.uniformity()
    }

    fn unordered_tuples(&self) -> bool {
        true
    }
}

impl Relational for OrderedStructure {
    fn universe_size(&self) -> usize {
        self.size()
    }

    fn relation_sets(&self) -> Vec<&BTreeSet<Tuple>> {
        self.relations().iter().collect()
    }

    fn same_type(&self, other: &Self) -> bool {
        self.signature() == other.signature()
    }
}

/// Outcome of each clause of the embedding definition, tested separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmbeddingCheck {
    /// Defined on the whole domain with images inside the codomain.
    pub total: bool,
    pub injective: bool,
    pub order_preserving: bool,
    /// Every tuple (edge) of the domain maps to a tuple of the codomain.
    pub preserves: bool,
    /// Every codomain tuple inside the image comes from a domain tuple.
    pub reflects: bool,
}

impl EmbeddingCheck {
    pub fn holds(&self) -> bool {
        self.total && self.injective && self.order_preserving && self.preserves && self.reflects
    }
}

/// Checks every clause of "f is an embedding of `a` into `b`".
pub fn check_embedding<S: Relational>(a: &S, b: &S, f: &Embedding) -> EmbeddingCheck {
    let map = f.map();
    let nb = b.universe_size();
    let total = map.len() == a.universe_size() && map.iter().all(|&v| v >= 1 && v <= nb);
    if !total || !a.same_type(b) {
        return EmbeddingCheck::default();
    }
    let mut inverse = vec![0usize; nb + 1];
    let mut injective = true;
    for (i, &v) in map.iter().enumerate() {
        if inverse[v] != 0 {
            injective = false;
        }
        inverse[v] = i + 1;
    }
    let order_preserving = map.windows(2).all(|p| p[0] < p[1]);
    let ra = a.relation_sets();
    let rb = b.relation_sets();
    let normalize = |mut t: Tuple| {
        if a.unordered_tuples() {
            t.sort_unstable();
        }
        t
    };
    let preserves = ra.iter().zip(&rb).all(|(sa, sb)| {
        sa.iter().all(|t| {
            let image: Tuple = t.iter().map(|&x| map[x - 1]).collect();
            sb.contains(&normalize(image))
        })
    });
    let reflects = injective
        && ra.iter().zip(&rb).all(|(sa, sb)| {
            sb.iter().all(|t| {
                if t.iter().any(|&y| inverse[y] == 0) {
                    return true;
                }
                let pre: Tuple = t.iter().map(|&y| inverse[y]).collect();
                sa.contains(&normalize(pre))
            })
        });
    EmbeddingCheck {
        total,
        injective,
        order_preserving,
        preserves,
        reflects,
    }
}

pub(crate) fn check_structure_embedding(
    a: &OrderedStructure,
    b: &OrderedStructure,
    f: &Embedding,
) -> EmbeddingCheck {
    check_embedding(a, b, f)
}

/// All embeddings `a ↪ b` in lexicographic order of their image lists.
///
/// Vertices are placed in increasing order; each partial map is pruned as
/// soon as a tuple whose largest vertex was just placed is violated.
pub fn enumerate_embeddings<S: Relational>(
    a: &S,
    b: &S,
    cap: usize,
) -> Result<Vec<Embedding>, StructureError> {
    let mut out = Vec::new();
    search_embeddings(a, b, cap, &mut out)?;
    Ok(out)
}

/// The lexicographically first embedding `a ↪ b`, if any.
pub fn first_embedding<S: Relational>(a: &S, b: &S) -> Result<Option<Embedding>, StructureError> {
    let mut out = Vec::new();
    match search_embeddings(a, b, 1, &mut out) {
        Ok(()) | Err(StructureError::SizeLimitExceeded { .. }) => Ok(out.into_iter().next()),
        Err(e) => Err(e),
    }
}

fn search_embeddings<S: Relational>(
    a: &S,
    b: &S,
    cap: usize,
    out: &mut Vec<Embedding>,
) -> Result<(), StructureError> {
    if !a.same_type(b) {
        return Err(StructureError::SignatureMismatch);
    }
    let na = a.universe_size();
    let nb = b.universe_size();
    if na > nb {
        return Ok(());
    }
    let ra = a.relation_sets();
    let rb = b.relation_sets();
    // tuples indexed by their largest entry
    let mut a_by_max: Vec<Vec<(usize, &Tuple)>> = vec![Vec::new(); na + 1];
    for (r, set) in ra.iter().enumerate() {
        for t in set.iter() {
            let mx = t.iter().copied().max().unwrap_or(0);
            a_by_max[mx].push((r, t));
        }
    }
    let mut b_by_max: Vec<Vec<(usize, &Tuple)>> = vec![Vec::new(); nb + 1];
    for (r, set) in rb.iter().enumerate() {
        for t in set.iter() {
            let mx = t.iter().copied().max().unwrap_or(0);
            b_by_max[mx].push((r, t));
        }
    }
    // tuples with no entries (arity 0 does not occur) never need checking
    let mut search = Search {
        ra: &ra,
        rb: &rb,
        a_by_max: &a_by_max,
        b_by_max: &b_by_max,
        map: Vec::with_capacity(na),
        inverse: vec![0; nb + 1],
        na,
        nb,
        cap,
        out,
    };
    search.extend()
}

struct Search<'a> {
    ra: &'a [&'a BTreeSet<Tuple>],
    rb: &'a [&'a BTreeSet<Tuple>],
    a_by_max: &'a [Vec<(usize, &'a Tuple)>],
    b_by_max: &'a [Vec<(usize, &'a Tuple)>],
    map: Vec<usize>,
    inverse: Vec<usize>,
    na: usize,
    nb: usize,
    cap: usize,
    out: &'a mut Vec<Embedding>,
}

impl Search<'_> {
    fn extend(&mut self) -> Result<(), StructureError> {
        let placed = self.map.len();
        if placed == self.na {
            if self.out.len() >= self.cap {
                return Err(StructureError::SizeLimitExceeded {
                    count: self.cap as u128 + 1,
                    cap: self.cap,
                });
            }
            self.out.push(Embedding {
                map: self.map.clone(),
                codomain: self.nb,
            });
            return Ok(());
        }
        let vertex = placed + 1;
        let lo = self.map.last().map_or(1, |&v| v + 1);
        let hi = self.nb - (self.na - vertex);
        for image in lo..=hi {
            self.map.push(image);
            self.inverse[image] = vertex;
            if self.consistent(vertex, image) {
                self.extend()?;
            }
            self.inverse[image] = 0;
            self.map.pop();
        }
        Ok(())
    }

    fn consistent(&self, vertex: usize, image: usize) -> bool {
        let preserved = self.a_by_max[vertex].iter().all(|&(r, t)| {
            let img: Tuple = t.iter().map(|&x| self.map[x - 1]).collect();
            self.rb[r].contains(&img)
        });
        preserved
            && self.b_by_max[image].iter().all(|&(r, t)| {
                if t.iter().any(|&y| self.inverse[y] == 0) {
                    return true;
                }
                let pre: Tuple = t.iter().map(|&y| self.inverse[y]).collect();
                self.ra[r].contains(&pre)
            })
    }
}
