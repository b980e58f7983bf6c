//! The concrete categories: chains, Graham-Rothschild words, ordered
//! hypergraphs, ordered relational structures, finite products and
//! subcategories given by a morphism predicate.

use std::fmt;
use std::sync::Arc;

use super::{Category, CategoryError};
use crate::ordstruct::{enumerate_embeddings, Embedding, Hypergraph, OrderedStructure, Signature};
use crate::paramwords::{enumerate_words, Alphabet, ParamWord};

fn compose_maps(g: &Embedding, f: &Embedding) -> Result<Embedding, CategoryError> {
    g.after(f).ok_or_else(|| {
        CategoryError::DomainMismatch(format!(
            "codomain of {f} has {} points, domain of {g} has {}",
            f.codomain_size(),
            g.domain_size()
        ))
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Finite chains `{1..n}` with strictly increasing maps.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChainCategory;

impl Category for ChainCategory {
    type Object = usize;
    type Morphism = Embedding;

    fn identity(&self, a: &usize) -> Embedding {
        Embedding::identity(*a)
    }

    fn compose(&self, g: &Embedding, f: &Embedding) -> Result<Embedding, CategoryError> {
        compose_maps(g, f)
    }

    fn hom(&self, a: &usize, b: &usize, cap: usize) -> Result<Vec<Embedding>, CategoryError> {
        let count = binomial(*b, *a);
        if count > cap as u128 {
            return Err(CategoryError::SizeLimitExceeded {
                count,
                cap: cap as u128,
            });
        }
        let (a, b) = (*a, *b);
        let mut out = Vec::with_capacity(count as usize);
        if a > b {
            return Ok(out);
        }
        let mut current: Vec<usize> = (1..=a).collect();
        loop {
            out.push(Embedding::new(current.clone(), b).expect("images in range"));
            // next a-subset of {1..b} in lexicographic order
            let Some(i) = (0..a).rev().find(|&i| current[i] < b - (a - 1 - i)) else {
                break;
            };
            current[i] += 1;
            for j in i + 1..a {
                current[j] = current[j - 1] + 1;
            }
        }
        Ok(out)
    }

    fn encode(&self, f: &Embedding) -> Vec<u8> {
        f.encode()
    }
}

/// The Graham-Rothschild category over a finite alphabet: objects are
/// naturals, `hom(m, n)` is the set of `m`-parameter words of length `n`.
#[derive(Debug, Clone)]
pub struct GrCategory {
    alphabet: Arc<Alphabet>,
}

impl GrCategory {
    pub fn new(alphabet: Alphabet) -> Self {
        Self {
            alphabet: Arc::new(alphabet),
        }
    }

    /// `GR({0})`.
    pub fn zero() -> Self {
        Self::new(Alphabet::zero())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }
}

impl Category for GrCategory {
    type Object = usize;
    type Morphism = ParamWord;

    fn identity(&self, a: &usize) -> ParamWord {
        ParamWord::identity(Arc::clone(&self.alphabet), *a)
    }

    fn compose(&self, g: &ParamWord, f: &ParamWord) -> Result<ParamWord, CategoryError> {
        g.substitute(f)
            .map_err(|e| CategoryError::DomainMismatch(e.to_string()))
    }

    fn hom(&self, a: &usize, b: &usize, cap: usize) -> Result<Vec<ParamWord>, CategoryError> {
        enumerate_words(&self.alphabet, *b, *a, cap).map_err(CategoryError::from_word)
    }

    fn encode(&self, f: &ParamWord) -> Vec<u8> {
        f.encode()
    }
}

/// Linearly ordered `b`-uniform hypergraphs with embeddings.
#[derive(Debug, Clone, Copy)]
pub struct HyperCategory {
    uniformity: usize,
}

impl HyperCategory {
    pub fn new(uniformity: usize) -> Self {
        Self { uniformity }
    }

    pub fn uniformity(&self) -> usize {
        self.uniformity
    }
}

impl Category for HyperCategory {
    type Object = Hypergraph;
    type Morphism = Embedding;

    fn identity(&self, a: &Hypergraph) -> Embedding {
        Embedding::identity(a.size())
    }

    fn compose(&self, g: &Embedding, f: &Embedding) -> Result<Embedding, CategoryError> {
        compose_maps(g, f)
    }

    fn hom(
        &self,
        a: &Hypergraph,
        b: &Hypergraph,
        cap: usize,
    ) -> Result<Vec<Embedding>, CategoryError> {
        for h in [a, b] {
            if h.uniformity() != self.uniformity {
                return Err(CategoryError::ForeignObject(format!(
                    "{}-uniform hypergraph in H({})",
                    h.uniformity(),
                    self.uniformity
                )));
            }
        }
        enumerate_embeddings(a, b, cap).map_err(CategoryError::from_structure)
    }

    fn encode(&self, f: &Embedding) -> Vec<u8> {
        f.encode()
    }
}

/// Linearly ordered structures of a fixed signature with embeddings.
#[derive(Debug, Clone)]
pub struct RelCategory {
    signature: Signature,
}

impl RelCategory {
    pub fn new(signature: Signature) -> Self {
        Self { signature }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }
}

impl Category for RelCategory {
    type Object = OrderedStructure;
    type Morphism = Embedding;

    fn identity(&self, a: &OrderedStructure) -> Embedding {
        Embedding::identity(a.size())
    }

    fn compose(&self, g: &Embedding, f: &Embedding) -> Result<Embedding, CategoryError> {
        compose_maps(g, f)
    }

    fn hom(
        &self,
        a: &OrderedStructure,
        b: &OrderedStructure,
        cap: usize,
    ) -> Result<Vec<Embedding>, CategoryError> {
        for s in [a, b] {
            if s.signature() != &self.signature {
                return Err(CategoryError::ForeignObject(
                    "structure over a different signature".into(),
                ));
            }
        }
        enumerate_embeddings(a, b, cap).map_err(CategoryError::from_structure)
    }

    fn encode(&self, f: &Embedding) -> Vec<u8> {
        f.encode()
    }
}

/// Product of finitely many categories of one Rust type; objects and
/// morphisms are tuples, composed componentwise.
#[derive(Debug, Clone)]
pub struct Product<C> {
    factors: Vec<C>,
}

impl<C: Category> Product<C> {
    pub fn new(factors: Vec<C>) -> Self {
        Self { factors }
    }

    pub fn factors(&self) -> &[C] {
        &self.factors
    }

    fn check_arity<T>(&self, items: &[T]) -> Result<(), CategoryError> {
        if items.len() != self.factors.len() {
            return Err(CategoryError::ForeignObject(format!(
                "{}-tuple in a {}-fold product",
                items.len(),
                self.factors.len()
            )));
        }
        Ok(())
    }
}

impl<C: Category> Category for Product<C> {
    type Object = Vec<C::Object>;
    type Morphism = Vec<C::Morphism>;

    fn identity(&self, a: &Self::Object) -> Self::Morphism {
        self.factors
            .iter()
            .zip(a)
            .map(|(c, x)| c.identity(x))
            .collect()
    }

    fn compose(
        &self,
        g: &Self::Morphism,
        f: &Self::Morphism,
    ) -> Result<Self::Morphism, CategoryError> {
        self.check_arity(g)?;
        self.check_arity(f)?;
        self.factors
            .iter()
            .zip(g.iter().zip(f))
            .map(|(c, (gi, fi))| c.compose(gi, fi))
            .collect()
    }

    fn hom(
        &self,
        a: &Self::Object,
        b: &Self::Object,
        cap: usize,
    ) -> Result<Vec<Self::Morphism>, CategoryError> {
        self.check_arity(a)?;
        self.check_arity(b)?;
        let mut parts = Vec::with_capacity(self.factors.len());
        let mut count: u128 = 1;
        for ((c, x), y) in self.factors.iter().zip(a).zip(b) {
            let mut part = c.hom(x, y, cap)?;
            part.sort_by_key(|m| c.encode(m));
            count = count.saturating_mul(part.len() as u128);
            parts.push(part);
        }
        if count > cap as u128 {
            return Err(CategoryError::SizeLimitExceeded {
                count,
                cap: cap as u128,
            });
        }
        let mut out: Vec<Self::Morphism> = vec![Vec::new()];
        for part in &parts {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    part.iter().map(move |m| {
                        let mut next = prefix.clone();
                        next.push(m.clone());
                        next
                    })
                })
                .collect();
        }
        Ok(out)
    }

    fn encode(&self, f: &Self::Morphism) -> Vec<u8> {
        let mut out = Vec::new();
        for (c, m) in self.factors.iter().zip(f) {
            let bytes = c.encode(m);
            out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
            out.extend_from_slice(&bytes);
        }
        out
    }
}

type MorphismFilter<M> = Arc<dyn Fn(&M) -> bool + Send + Sync>;

/// The (not necessarily full) subcategory of `parent` whose morphisms satisfy
/// a predicate; identities must satisfy it and it must be closed under
/// composition.
#[derive(Clone)]
pub struct Subcategory<C: Category> {
    parent: C,
    id: String,
    keep: MorphismFilter<C::Morphism>,
}

impl<C: Category> Subcategory<C> {
    pub fn new(
        parent: C,
        id: impl Into<String>,
        keep: impl Fn(&C::Morphism) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            parent,
            id: id.into(),
            keep: Arc::new(keep),
        }
    }

    pub fn parent(&self) -> &C {
        &self.parent
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn contains(&self, f: &C::Morphism) -> bool {
        (self.keep)(f)
    }
}

impl<C: Category + fmt::Debug> fmt::Debug for Subcategory<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subcategory")
            .field("parent", &self.parent)
            .field("id", &self.id)
            .finish()
    }
}

impl<C: Category> Category for Subcategory<C> {
    type Object = C::Object;
    type Morphism = C::Morphism;

    fn identity(&self, a: &C::Object) -> C::Morphism {
        self.parent.identity(a)
    }

    fn compose(&self, g: &C::Morphism, f: &C::Morphism) -> Result<C::Morphism, CategoryError> {
        self.parent.compose(g, f)
    }

    fn hom(
        &self,
        a: &C::Object,
        b: &C::Object,
        cap: usize,
    ) -> Result<Vec<C::Morphism>, CategoryError> {
        Ok(self
            .parent
            .hom(a, b, cap)?
            .into_iter()
            .filter(|f| (self.keep)(f))
            .collect())
    }

    fn encode(&self, f: &C::Morphism) -> Vec<u8> {
        self.parent.encode(f)
    }
}

/// Tuples whose components are all the same map: the image of a category of
/// structures inside the product of its single-relation reducts.
pub fn diagonal_embeddings(f: &[Embedding]) -> bool {
    f.windows(2).all(|p| p[0] == p[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::enumerate_hom;

    #[test]
    fn gr_composition_and_hom_examples() {
        let gr = GrCategory::zero();
        let ab = Arc::clone(gr.alphabet());
        let u = ParamWord::parse(Arc::clone(&ab), "x1 0 x2").unwrap();
        let v = ParamWord::parse(Arc::clone(&ab), "x1 x1").unwrap();
        assert_eq!(gr.compose(&u, &v).unwrap().to_string(), "x1 0 x1");
        assert_eq!(gr.compose(&gr.identity(&3), &u).unwrap(), u);
        let h12: Vec<String> = enumerate_hom(&gr, &1, &2, 100)
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(h12, ["0 x1", "x1 0", "x1 x1"]);
        assert!(enumerate_hom(&gr, &3, &2, 100).unwrap().is_empty());
        assert!(matches!(
            gr.compose(&v, &u),
            Err(CategoryError::DomainMismatch(_))
        ));
    }

    #[test]
    fn chain_examples() {
        let c = ChainCategory;
        let f = Embedding::new(vec![1], 1).unwrap();
        let g = Embedding::new(vec![3], 3).unwrap();
        assert_eq!(c.compose(&g, &f).unwrap(), g);
        assert_eq!(enumerate_hom(&c, &2, &3, 100).unwrap().len(), 3);
        assert!(enumerate_hom(&c, &3, &2, 100).unwrap().is_empty());
        assert!(c.compose(&f, &g).is_err());
        let maps: Vec<Vec<usize>> = enumerate_hom(&c, &2, &4, 100)
            .unwrap()
            .iter()
            .map(|e| e.map().to_vec())
            .collect();
        assert_eq!(
            maps,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
    }

    #[test]
    fn product_hom_is_cartesian() {
        let p = Product::new(vec![ChainCategory, ChainCategory]);
        let hom = enumerate_hom(&p, &vec![1, 2], &vec![3, 3], 100).unwrap();
        assert_eq!(hom.len(), 9);
        let id = p.identity(&vec![3, 3]);
        assert_eq!(p.compose(&id, &hom[4]).unwrap(), hom[4]);
        assert!(p.hom(&vec![1], &vec![2, 2], 100).is_err());
    }

    #[test]
    fn diagonal_subcategory_filters() {
        let p = Product::new(vec![ChainCategory, ChainCategory]);
        let d = Subcategory::new(p, "diagonal", |f: &Vec<Embedding>| diagonal_embeddings(f));
        let hom = enumerate_hom(&d, &vec![1, 1], &vec![3, 3], 100).unwrap();
        assert_eq!(hom.len(), 3);
        assert!(hom.iter().all(|f| f[0] == f[1]));
    }

    #[test]
    fn foreign_objects_are_rejected() {
        let h = HyperCategory::new(3);
        let g = Hypergraph::edgeless(2, 2).unwrap();
        assert!(matches!(
            h.hom(&g, &g, 10),
            Err(CategoryError::ForeignObject(_))
        ));
    }
}
