//! Finite categories with enumerable hom-sets, law checking, and the
//! Ramsey-arrow verifier.
//!
//! A [`Category`] only has to compose, produce identities and list hom-sets.
//! Everything else (law checks, `C → (B)^A_k` decisions, witness search) is
//! generic and works on the canonical, byte-ordered hom lists returned by
//! [`enumerate_hom`].

mod arrow;
mod cats;
mod laws;

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::ordstruct::StructureError;
use crate::paramwords::WordError;

pub use arrow::{
    copy_system, find_monochromatic, search_witness, verify_arrow, verify_arrow_with, ArrowReport,
    ArrowStats, Coloring, CopySystem, Mode, Verdict,
};
pub use cats::{
    diagonal_embeddings, ChainCategory, GrCategory, HyperCategory, Product, RelCategory,
    Subcategory,
};
pub use laws::{check_category_laws, LawReport, LawViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("cannot compose: {0}")]
    DomainMismatch(String),
    #[error("object is not in this category: {0}")]
    ForeignObject(String),
    #[error("{count} morphisms exceed the cap of {cap}")]
    SizeLimitExceeded { count: u128, cap: u128 },
    #[error("search budget of {nodes} nodes exhausted")]
    BudgetExceeded { nodes: u64 },
    #[error("candidate stream ended without a witness")]
    Exhausted,
    #[error("hom(A, B) is empty")]
    EmptyHom,
    #[error("color count {0} outside the supported range 2..=16")]
    BadColorCount(u32),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

impl CategoryError {
    pub(crate) fn from_structure(err: StructureError) -> Self {
        match err {
            StructureError::SizeLimitExceeded { count, cap } => CategoryError::SizeLimitExceeded {
                count,
                cap: cap as u128,
            },
            other => CategoryError::Structure(other),
        }
    }

    pub(crate) fn from_word(err: WordError) -> Self {
        match err {
            WordError::SizeLimitExceeded { count, cap } => CategoryError::SizeLimitExceeded {
                count,
                cap: cap as u128,
            },
            other => CategoryError::Word(other),
        }
    }
}

/// A category whose hom-sets are finite and can be listed.
pub trait Category {
    type Object: Clone + Debug + PartialEq;
    type Morphism: Clone + Debug + Eq + Hash;

    fn identity(&self, a: &Self::Object) -> Self::Morphism;

    /// `g ∘ f`: first `f`, then `g`.
    fn compose(
        &self,
        g: &Self::Morphism,
        f: &Self::Morphism,
    ) -> Result<Self::Morphism, CategoryError>;

    /// All morphisms `a -> b`, in any order; at most `cap` of them.
    fn hom(
        &self,
        a: &Self::Object,
        b: &Self::Object,
        cap: usize,
    ) -> Result<Vec<Self::Morphism>, CategoryError>;

    /// Canonical byte serialization; hom-sets are ordered by it.
    fn encode(&self, f: &Self::Morphism) -> Vec<u8>;
}

/// The hom-set `a -> b`, duplicate free and sorted by [`Category::encode`].
pub fn enumerate_hom<C: Category>(
    cat: &C,
    a: &C::Object,
    b: &C::Object,
    cap: usize,
) -> Result<Vec<C::Morphism>, CategoryError> {
    let hom = cat.hom(a, b, cap)?;
    let mut keyed: Vec<(Vec<u8>, C::Morphism)> =
        hom.into_iter().map(|f| (cat.encode(&f), f)).collect();
    keyed.sort_by(|x, y| x.0.cmp(&y.0));
    keyed.dedup_by(|x, y| x.0 == y.0);
    Ok(keyed.into_iter().map(|(_, f)| f).collect())
}

/// Composes `g ∘ f`.
pub fn compose<C: Category>(
    cat: &C,
    g: &C::Morphism,
    f: &C::Morphism,
) -> Result<C::Morphism, CategoryError> {
    cat.compose(g, f)
}

/// Resource limits shared by enumeration and arrow verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest hom-set any enumeration may produce.
    pub hom_cap: usize,
    /// Largest `|hom(A, C)|` accepted by exhaustive verification.
    pub exhaustive_positions: usize,
    /// Largest `k^|hom(A, C)|` accepted by exhaustive verification.
    pub coloring_cap: u128,
    /// Search nodes allowed to the backtracking verifier.
    pub node_cap: u64,
    /// Worker threads for the backtracking verifier; 1 is deterministic.
    pub jobs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            hom_cap: 1 << 20,
            exhaustive_positions: 32,
            coloring_cap: 1 << 32,
            node_cap: 100_000_000,
            jobs: 1,
        }
    }
}

pub const MIN_COLORS: u32 = 2;
pub const MAX_COLORS: u32 = 16;
