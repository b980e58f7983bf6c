//! The downset pre-adjunction between `b`-uniform ordered hypergraphs and
//! the parameter words over `{0}`.
//!
//! `F(A)` is the number of downsets of `A`; `G(n)` is the hypergraph on the
//! subsets of `{1..n}` in complemented lexicographic order whose edges are
//! the `b`-sets with a common point. A word `u` with one variable per downset
//! sends vertex `i` to the union of the blocks of the downsets containing `i`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use super::preadj::PreAdjunction;
use super::TransferError;
use crate::fincat::{GrCategory, HyperCategory};
use crate::ordstruct::{
    check_embedding, downsets, gr_target_hypergraph, Embedding, EmbeddingCheck, Hypergraph,
    TargetHypergraph,
};
use crate::paramwords::{Letter, ParamWord};

/// Number of downsets of `h`.
pub fn downset_count(h: &Hypergraph) -> usize {
    downsets(h).len()
}

fn require_zero_alphabet(u: &ParamWord) -> Result<(), TransferError> {
    if u.alphabet().symbols() == ["0"] {
        Ok(())
    } else {
        Err(TransferError::UnsupportedAlphabet)
    }
}

/// The sets `a_i`: union of the blocks `u⁻¹(x_α)` over downsets `D_α ∋ i`.
pub fn phi_sets(h: &Hypergraph, u: &ParamWord) -> Result<Vec<BTreeSet<usize>>, TransferError> {
    require_zero_alphabet(u)?;
    let ds = downsets(h);
    if u.params() != ds.len() {
        return Err(TransferError::ArityMismatch {
            expected: ds.len(),
            found: u.params(),
        });
    }
    let blocks = u.variable_blocks();
    let mut sets = vec![BTreeSet::new(); h.size()];
    for (alpha, d) in ds.iter().enumerate() {
        for &i in d {
            sets[i - 1].extend(blocks[alpha].iter().copied());
        }
    }
    Ok(sets)
}

/// `Φ(u)` together with the outcome of each embedding clause.
pub fn phi_checked(
    h: &Hypergraph,
    target: &TargetHypergraph,
    u: &ParamWord,
) -> Result<(Embedding, EmbeddingCheck), TransferError> {
    if u.len() != target.n() {
        return Err(TransferError::ArityMismatch {
            expected: target.n(),
            found: u.len(),
        });
    }
    if target.uniformity() != h.uniformity() {
        return Err(TransferError::ArityMismatch {
            expected: h.uniformity(),
            found: target.uniformity(),
        });
    }
    let sets = phi_sets(h, u)?;
    let map = sets
        .iter()
        .map(|s| {
            let mask = s.iter().fold(0u64, |m, &x| m | 1 << (x - 1));
            target.vertex_of(mask)
        })
        .collect();
    let f = Embedding::new(map, target.hypergraph().size())?;
    let check = check_embedding(h, target.hypergraph(), &f);
    Ok((f, check))
}

/// `Φ(u)` into a prebuilt target; fails if the result is not an embedding.
pub fn phi_with_target(
    h: &Hypergraph,
    target: &TargetHypergraph,
    u: &ParamWord,
) -> Result<Embedding, TransferError> {
    let (f, check) = phi_checked(h, target, u)?;
    if !check.holds() {
        return Err(TransferError::EmbeddingCheckFailed(format!("{check:?}")));
    }
    Ok(f)
}

/// `Φ(u)` into `G(u.len())`, built with vertex cap `cap`.
pub fn phi(h: &Hypergraph, u: &ParamWord, cap: usize) -> Result<Embedding, TransferError> {
    let target = gr_target_hypergraph(u.len(), h.uniformity(), cap)?;
    phi_with_target(h, &target, u)
}

/// For an embedding `f: B ↪ A`, the word `h` with `h_i = x_j` when
/// `f⁻¹(D_i) = D'_j` and `h_i = 0` otherwise (`D` the downsets of `A`,
/// `D'` those of `B`).
pub fn lift_word(
    f: &Embedding,
    a: &Hypergraph,
    b: &Hypergraph,
) -> Result<ParamWord, TransferError> {
    if !check_embedding(b, a, f).holds() {
        return Err(TransferError::NotAnEmbedding);
    }
    let da = downsets(a);
    let db = downsets(b);
    let letters: Vec<Letter> = da
        .iter()
        .map(|d| {
            let pre = f.preimage(d);
            match db.iter().position(|e| *e == pre) {
                Some(j) => Letter::Var(j + 1),
                None => Letter::Const(0),
            }
        })
        .collect();
    let gr = GrCategory::zero();
    ParamWord::validate(Arc::clone(gr.alphabet()), da.len(), db.len(), letters)
        .map_err(TransferError::LiftInvalid)
}

/// The pre-adjunction `F: H(b) ⇄ GR({0}) : G`.
#[derive(Debug)]
pub struct HypergraphGr {
    gr: GrCategory,
    hyper: HyperCategory,
    cap: usize,
    targets: Mutex<HashMap<usize, Arc<TargetHypergraph>>>,
}

impl HypergraphGr {
    /// `cap` bounds the number of vertices and edges of any `G(n)` built.
    pub fn new(uniformity: usize, cap: usize) -> Self {
        Self {
            gr: GrCategory::zero(),
            hyper: HyperCategory::new(uniformity),
            cap,
            targets: Mutex::new(HashMap::new()),
        }
    }

    pub fn target(&self, n: usize) -> Result<Arc<TargetHypergraph>, TransferError> {
        let mut cache = self.targets.lock().expect("cache lock");
        if let Some(t) = cache.get(&n) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(gr_target_hypergraph(n, self.hyper.uniformity(), self.cap)?);
        cache.insert(n, Arc::clone(&t));
        Ok(t)
    }
}

impl PreAdjunction for HypergraphGr {
    type Upper = GrCategory;
    type Lower = HyperCategory;

    fn upper(&self) -> &GrCategory {
        &self.gr
    }

    fn lower(&self) -> &HyperCategory {
        &self.hyper
    }

    fn f_obj(&self, y: &Hypergraph) -> usize {
        downset_count(y)
    }

    fn g_obj(&self, x: &usize) -> Result<Hypergraph, TransferError> {
        Ok(self.target(*x)?.hypergraph().clone())
    }

    fn phi(&self, y: &Hypergraph, x: &usize, u: &ParamWord) -> Result<Embedding, TransferError> {
        phi_with_target(y, &*self.target(*x)?, u)
    }

    fn lift(
        &self,
        e: &Hypergraph,
        d: &Hypergraph,
        f: &Embedding,
    ) -> Result<ParamWord, TransferError> {
        lift_word(f, d, e)
    }
}
