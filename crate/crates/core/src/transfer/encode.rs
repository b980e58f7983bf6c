//! Encodings between arbitrary ordered structures and absolutely ordered
//! ones (`dagger` / `star`), and the reduction to a finite signature
//! (`sigma_reduce` / `expand_witness`).
//!
//! The symbol `(R, σ)` of the expanded language is named `R|ranks`, where
//! `ranks` is the rank vector of `σ`, e.g. `R|2,1` for the type of `(2, 1)`.

use std::collections::BTreeSet;

use super::quasiorder::{mat, tp, tup, TotalQuasiorder};
use super::TransferError;
use crate::ordstruct::{first_embedding, OrderedStructure, Signature, Tuple};

pub fn expanded_symbol(name: &str, sigma: &TotalQuasiorder) -> String {
    format!("{name}|{sigma}")
}

/// Splits `R|ranks` into `R` and its quasiorder.
pub fn parse_expanded_symbol(symbol: &str) -> Result<(String, TotalQuasiorder), TransferError> {
    let bad = || TransferError::BadSymbolName(symbol.to_string());
    let (name, ranks) = symbol.rsplit_once('|').ok_or_else(bad)?;
    let ranks = ranks
        .split(',')
        .map(|r| r.parse::<usize>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    let sigma = TotalQuasiorder::from_ranks(ranks).map_err(|_| bad())?;
    Ok((name.to_string(), sigma))
}

/// The language of pairs `(R, σ)`, `σ` ranging over all total quasiorders on
/// `{1..ar(R)}`; `(R, σ)` has one place per class of `σ`.
pub fn expanded_signature(theta: &Signature) -> Signature {
    let symbols: Vec<(String, usize)> = theta
        .symbols()
        .iter()
        .flat_map(|(name, arity)| {
            TotalQuasiorder::all(*arity)
                .into_iter()
                .map(move |s| (expanded_symbol(name, &s), s.classes()))
        })
        .collect();
    Signature::new(symbols).expect("distinct names with positive arities")
}

/// Replaces each tuple by its matrix, filed under the symbol of its type.
/// The result is absolutely ordered.
pub fn dagger(a: &OrderedStructure) -> OrderedStructure {
    let sig = expanded_signature(a.signature());
    let mut relations = vec![BTreeSet::new(); sig.len()];
    for (idx, (name, _)) in a.signature().symbols().iter().enumerate() {
        for t in &a.relations()[idx] {
            let symbol = expanded_symbol(name, &tp(t));
            let slot = sig.index_of(&symbol).expect("every type has a symbol");
            relations[slot].insert(mat(t));
        }
    }
    let out = OrderedStructure::new(sig, a.size(), relations).expect("matrices stay in range");
    debug_assert!(out.is_absolutely_ordered());
    out
}

/// Inverse of [`dagger`]. The original language is read off the symbol
/// names, in order of first appearance.
pub fn star(b: &OrderedStructure) -> Result<OrderedStructure, TransferError> {
    if !b.is_absolutely_ordered() {
        return Err(TransferError::NotAbsolutelyOrdered);
    }
    let mut theta: Vec<(String, usize)> = Vec::new();
    let mut parsed = Vec::with_capacity(b.signature().len());
    for (symbol, arity) in b.signature().symbols() {
        let (name, sigma) = parse_expanded_symbol(symbol)?;
        if sigma.classes() != *arity {
            return Err(TransferError::BadSymbolName(symbol.clone()));
        }
        match theta.iter().find(|(n, _)| *n == name) {
            Some((_, r)) if *r != sigma.arity() => {
                return Err(TransferError::BadSymbolName(symbol.clone()))
            }
            Some(_) => {}
            None => theta.push((name.clone(), sigma.arity())),
        }
        parsed.push((name, sigma));
    }
    let theta = Signature::new(theta)?;
    let mut relations: Vec<BTreeSet<Tuple>> = vec![BTreeSet::new(); theta.len()];
    for (idx, (name, sigma)) in parsed.iter().enumerate() {
        let slot = theta.index_of(name).expect("collected above");
        for t in &b.relations()[idx] {
            relations[slot].insert(tup(sigma, t)?);
        }
    }
    Ok(OrderedStructure::new(theta, b.size(), relations)?)
}

/// What a symbol outside the reduced signature becomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Remap {
    /// Empty in `B` (and therefore in `A`).
    Empty,
    /// Same extension as this kept symbol.
    Same(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaReduction {
    pub sigma: Signature,
    /// Dropped symbols in signature order.
    pub remap: Vec<(String, Remap)>,
}

/// Keeps one symbol per distinct nonempty extension in `b`, the first in
/// signature order; every other symbol is empty in `b` or copies a kept one.
pub fn sigma_reduce(
    a: &OrderedStructure,
    b: &OrderedStructure,
) -> Result<SigmaReduction, TransferError> {
    if a.signature() != b.signature() {
        return Err(TransferError::NoEmbedding);
    }
    if first_embedding(a, b)?.is_none() {
        return Err(TransferError::NoEmbedding);
    }
    let theta = b.signature();
    let mut kept: Vec<usize> = Vec::new();
    let mut remap = Vec::new();
    for idx in 0..theta.len() {
        let name = theta.name(idx).to_string();
        let rel_b = &b.relations()[idx];
        let rel_a = &a.relations()[idx];
        if rel_b.is_empty() {
            if !rel_a.is_empty() {
                return Err(TransferError::InvalidRemap(format!(
                    "{name} is empty in B but not in A"
                )));
            }
            remap.push((name, Remap::Empty));
            continue;
        }
        match kept.iter().find(|&&s| &b.relations()[s] == rel_b) {
            Some(&s) => {
                if &a.relations()[s] != rel_a {
                    return Err(TransferError::InvalidRemap(format!(
                        "{name} agrees with {} on B but not on A",
                        theta.name(s)
                    )));
                }
                remap.push((name, Remap::Same(theta.name(s).to_string())));
            }
            None => kept.push(idx),
        }
    }
    let sigma = Signature::new(
        kept.iter()
            .map(|&i| (theta.name(i).to_string(), theta.arity(i))),
    )?;
    Ok(SigmaReduction { sigma, remap })
}

/// Rebuilds a structure over `theta` from one over the reduced signature.
pub fn expand_witness(
    c: &OrderedStructure,
    reduction: &SigmaReduction,
    theta: &Signature,
) -> Result<OrderedStructure, TransferError> {
    if c.signature() != &reduction.sigma {
        return Err(TransferError::InvalidRemap(
            "witness is not over the reduced signature".into(),
        ));
    }
    let mut relations = Vec::with_capacity(theta.len());
    for (name, arity) in theta.symbols() {
        if let Some(rel) = c.relation(name) {
            relations.push(rel.clone());
            continue;
        }
        let rule = reduction
            .remap
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r)
            .ok_or_else(|| TransferError::InvalidRemap(format!("no rule for {name}")))?;
        match rule {
            Remap::Empty => relations.push(BTreeSet::new()),
            Remap::Same(s) => {
                let idx = reduction
                    .sigma
                    .index_of(s)
                    .ok_or_else(|| TransferError::InvalidRemap(format!("{s} is not kept")))?;
                if reduction.sigma.arity(idx) != *arity {
                    return Err(TransferError::InvalidRemap(format!(
                        "{name} and {s} have different arities"
                    )));
                }
                relations.push(c.relations()[idx].clone());
            }
        }
    }
    Ok(OrderedStructure::new(theta.clone(), c.size(), relations)?)
}
