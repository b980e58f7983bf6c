//! Constructions that move Ramsey witnesses between categories.
//!
//! * [`hgr`]: the downset pre-adjunction between ordered hypergraphs and
//!   parameter words (`phi`, `lift_word`).
//! * [`preadj`]: witnesses pulled back along any pre-adjunction.
//! * [`product`]: witnesses for finite products.
//! * [`closure`]: closing binary diagrams of absolutely ordered structures,
//!   and the subcategory transfer built on it.
//! * [`quasiorder`], [`encode`]: the reduction of arbitrary ordered
//!   structures to absolutely ordered ones over a finite signature.
//! * [`pipeline`]: everything chained together.
//!
//! Every transfer re-checks its output: on every coloring when there are few
//! enough, otherwise on seeded pseudorandom colorings, and says which.

pub mod closure;
pub mod encode;
pub mod hgr;
pub mod pipeline;
pub mod preadj;
pub mod product;
pub mod quasiorder;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fincat::{CategoryError, Limits, Mode};
use crate::ordstruct::StructureError;
use crate::paramwords::WordError;

pub use closure::{
    close_binary_diagram_rel, subcategory_transfer, BinaryDiagram, Closure, Cone, DiagramArrow,
    SubcategoryTransfer,
};
pub use encode::{
    dagger, expand_witness, expanded_signature, sigma_reduce, star, Remap, SigmaReduction,
};
pub use hgr::{downset_count, lift_word, phi, phi_sets, phi_with_target, HypergraphGr};
pub use pipeline::{nesetril_rodl_pipeline, PipelineOutcome, PipelineTrace, StageRecord};
pub use preadj::{transfer_preadjunction, PreAdjunction, PreadjunctionTransfer};
pub use product::{product_arrow, ProductArrow};
pub use quasiorder::{mat, tp, tup, TotalQuasiorder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("only the alphabet {{0}} is supported here")]
    UnsupportedAlphabet,
    #[error("the given map is not an embedding")]
    NotAnEmbedding,
    #[error("constructed map failed the embedding check: {0}")]
    EmbeddingCheckFailed(String),
    #[error("lifted word is invalid: {0}")]
    LiftInvalid(WordError),
    #[error("pre-adjunction square does not commute: {0}")]
    PreAdjunctionViolated(String),
    #[error("component arrow not verified: {0}")]
    ComponentArrowUnverified(String),
    #[error("decoded copy is not monochromatic: {0}")]
    DecodingFailed(String),
    #[error("quasiorder has {classes} classes but the tuple has length {len}")]
    ClassCountMismatch { classes: usize, len: usize },
    #[error("tuple is not strictly increasing")]
    NotStrictlyIncreasing,
    #[error("not a total quasiorder: {0}")]
    InvalidQuasiorder(String),
    #[error("structure is not absolutely ordered")]
    NotAbsolutelyOrdered,
    #[error("symbol `{0}` is not of the form NAME|ranks")]
    BadSymbolName(String),
    #[error("A does not embed into B")]
    NoEmbedding,
    #[error("invalid signature reduction: {0}")]
    InvalidRemap(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("cone legs disagree on diagram arrow #{arrow}")]
    IncompatibleCone { arrow: usize },
    #[error("closure failed: {0}")]
    ClosureFailed(String),
    #[error("relation `{symbol}` has arity {arity}; hypergraph transfer needs at least 2")]
    UnsupportedArity { symbol: String, arity: usize },
    #[error("{colors} colors exceed the supported maximum")]
    TooManyColors { colors: u128 },
    #[error("budget exceeded at stage `{stage}`")]
    BudgetExceeded { stage: String },
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// How a transfer's output was re-checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Exhaustive,
    Sampled { seed: u64 },
    BudgetExceeded,
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verification::Exhaustive => f.write_str("exhaustive"),
            Verification::Sampled { seed } => write!(f, "sampled({seed})"),
            Verification::BudgetExceeded => f.write_str("budget-exceeded"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferOptions {
    pub mode: Mode,
    pub limits: Limits,
    pub seed: u64,
    /// Colorings drawn when not all of them are checked.
    pub samples: usize,
    /// Largest number of colorings checked one by one.
    pub max_exhaustive: u128,
    /// Largest number of `(u, f)` pairs checked against the pre-adjunction
    /// square.
    pub square_checks: usize,
    /// Candidates beyond the smallest conceivable one tried by each witness
    /// search in the pipeline.
    pub search_span: usize,
}

impl Default for TransferOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Backtrack,
            limits: Limits::default(),
            seed: 0,
            samples: 256,
            max_exhaustive: 1 << 16,
            square_checks: 4096,
            search_span: 8,
        }
    }
}

/// Runs `check` on every `k`-coloring of `n` positions when there are at
/// most `max_exhaustive` of them, else on `samples` seeded random ones.
pub(crate) fn check_colorings<F>(
    n: usize,
    k: u32,
    opts: &TransferOptions,
    mut check: F,
) -> Result<(Verification, u128), TransferError>
where
    F: FnMut(&[u32]) -> Result<(), TransferError>,
{
    let count = (k as u128).checked_pow(n as u32);
    match count {
        Some(count) if count <= opts.max_exhaustive => {
            let mut colors = vec![1u32; n];
            for _ in 0..count {
                check(&colors)?;
                for c in colors.iter_mut().rev() {
                    if *c < k {
                        *c += 1;
                        break;
                    }
                    *c = 1;
                }
            }
            Ok((Verification::Exhaustive, count))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let mut colors = vec![1u32; n];
            for _ in 0..opts.samples {
                for c in colors.iter_mut() {
                    *c = rng.gen_range(1..=k);
                }
                check(&colors)?;
            }
            Ok((
                Verification::Sampled { seed: opts.seed },
                opts.samples as u128,
            ))
        }
    }
}

pub(crate) fn require_witnessed<M>(
    report: &crate::fincat::ArrowReport<M>,
    stage: &str,
) -> Result<(), TransferError> {
    match report.verdict {
        crate::fincat::Verdict::Witnessed => Ok(()),
        crate::fincat::Verdict::Refuted(_) => Err(TransferError::ComponentArrowUnverified(
            format!("{stage}: arrow refuted"),
        )),
        crate::fincat::Verdict::BudgetExceeded => Err(TransferError::BudgetExceeded {
            stage: stage.to_string(),
        }),
    }
}
