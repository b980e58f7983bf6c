//! The whole chain from an embedding `A ↪ B` of ordered structures to a
//! witness `C → (B)^A_k`:
//!
//! `dagger` → `sigma-reduce` → per symbol: GR witness search and transfer
//! along the downset pre-adjunction → product → subcategory closure →
//! `expand` → `star` → direct check.
//!
//! Each stage leaves a [`StageRecord`]. A stage that runs out of budget ends
//! the trace with [`PipelineOutcome::BudgetExceeded`] and keeps the records
//! of the stages before it.

use serde_json::{json, Value};

use super::closure::subcategory_transfer;
use super::encode::{dagger, expand_witness, sigma_reduce, star};
use super::hgr::{downset_count, HypergraphGr};
use super::preadj::transfer_preadjunction;
use super::product::{factor_color_counts, product_arrow};
use super::{TransferError, TransferOptions, Verification};
use crate::fincat::{
    enumerate_hom, search_witness, verify_arrow, CategoryError, ChainCategory, GrCategory,
    RelCategory, Verdict,
};
use crate::ordstruct::json::structure_to_value;
use crate::ordstruct::{first_embedding, Hypergraph, OrderedStructure};

#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub stage: String,
    pub verification: Option<Verification>,
    /// Stage-specific facts, deterministic for fixed inputs and options.
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineOutcome {
    Witness(OrderedStructure),
    BudgetExceeded { stage: String, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineTrace {
    pub stages: Vec<StageRecord>,
    pub outcome: PipelineOutcome,
}

impl PipelineTrace {
    pub fn witness(&self) -> Option<&OrderedStructure> {
        match &self.outcome {
            PipelineOutcome::Witness(c) => Some(c),
            PipelineOutcome::BudgetExceeded { .. } => None,
        }
    }

    pub fn to_value(&self) -> Value {
        let stages: Vec<Value> = self
            .stages
            .iter()
            .map(|s| {
                json!({
                    "stage": s.stage,
                    "verification": s.verification.map(|v| v.to_string()),
                    "detail": s.detail,
                })
            })
            .collect();
        let outcome = match &self.outcome {
            PipelineOutcome::Witness(c) => json!({"witness": structure_to_value(c)}),
            PipelineOutcome::BudgetExceeded { stage, reason } => {
                json!({"budget_exceeded": {"stage": stage, "reason": reason}})
            }
        };
        json!({"stages": stages, "outcome": outcome})
    }
}

/// Errors that only mean "not within the configured limits".
fn is_budget(err: &TransferError) -> bool {
    matches!(
        err,
        TransferError::BudgetExceeded { .. }
            | TransferError::TooManyColors { .. }
            | TransferError::ClosureFailed(_)
            | TransferError::Category(
                CategoryError::BudgetExceeded { .. }
                    | CategoryError::SizeLimitExceeded { .. }
                    | CategoryError::Exhausted
            )
            | TransferError::Structure(crate::ordstruct::StructureError::SizeLimitExceeded { .. })
            | TransferError::Word(crate::paramwords::WordError::SizeLimitExceeded { .. })
    )
}

struct Trace {
    stages: Vec<StageRecord>,
}

impl Trace {
    fn push(&mut self, stage: &str, verification: Option<Verification>, detail: Value) {
        self.stages.push(StageRecord {
            stage: stage.to_string(),
            verification,
            detail,
        });
    }

    fn stop(self, stage: &str, err: TransferError) -> Result<PipelineTrace, TransferError> {
        if is_budget(&err) {
            Ok(PipelineTrace {
                stages: self.stages,
                outcome: PipelineOutcome::BudgetExceeded {
                    stage: stage.to_string(),
                    reason: err.to_string(),
                },
            })
        } else {
            Err(err)
        }
    }
}

macro_rules! stage {
    ($trace:ident, $name:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return $trace.stop($name, err.into()),
        }
    };
}

/// Builds a witness `C → (B)^A_k` for ordered structures `a ↪ b`, or a trace
/// of the stages completed before the budget ran out. Witness search tries
/// at most `opts.search_span + 1` candidates per stage.
pub fn nesetril_rodl_pipeline(
    a: &OrderedStructure,
    b: &OrderedStructure,
    k: u32,
    opts: &TransferOptions,
) -> Result<PipelineTrace, TransferError> {
    let mut trace = Trace { stages: Vec::new() };
    let limits = &opts.limits;
    if a.signature() != b.signature() {
        return Err(TransferError::NoEmbedding);
    }
    let first = first_embedding(a, b)?.ok_or(TransferError::NoEmbedding)?;
    trace.push("embedding", None, json!({"first": first.map()}));

    let (ad, bd) = (dagger(a), dagger(b));
    trace.push(
        "dagger",
        None,
        json!({"symbols": ad.signature().len(), "a": structure_to_value(&ad), "b": structure_to_value(&bd)}),
    );

    let reduction = sigma_reduce(&ad, &bd)?;
    let sigma = reduction.sigma.clone();
    let remap: Vec<Value> = reduction
        .remap
        .iter()
        .map(|(name, r)| match r {
            super::Remap::Empty => json!([name, null]),
            super::Remap::Same(s) => json!([name, s]),
        })
        .collect();
    let kept: Vec<&str> = sigma.symbols().iter().map(|(n, _)| n.as_str()).collect();
    trace.push("sigma-reduce", None, json!({"kept": kept, "remap": remap}));
    let a_sigma = ad.reduct(&sigma)?;
    let b_sigma = bd.reduct(&sigma)?;

    let c_sigma = if sigma.is_empty() {
        let candidates = b.size()..=b.size() + opts.search_span;
        let (c, report) = stage!(
            trace,
            "chain-search",
            search_witness(
                &ChainCategory,
                &a.size(),
                &b.size(),
                k,
                candidates,
                opts.mode,
                limits
            )
        );
        trace.push(
            "chain-search",
            Some(Verification::Exhaustive),
            json!({"witness": c, "nodes": report.stats.nodes}),
        );
        OrderedStructure::new(sigma.clone(), c, Vec::new())?
    } else {
        for (name, arity) in sigma.symbols() {
            if *arity < 2 {
                return Err(TransferError::UnsupportedArity {
                    symbol: name.clone(),
                    arity: *arity,
                });
            }
        }
        let n = sigma.len();
        let mut components = Vec::with_capacity(n);
        let mut positions = Vec::with_capacity(n);
        for s in 0..n {
            let name = sigma.name(s).to_string();
            let mut upto: Vec<usize> = positions.clone();
            upto.push(1);
            let colors = *stage!(trace, "product", factor_color_counts(k, &upto))
                .last()
                .expect("one count per factor");
            let ha = Hypergraph::from_structure(&a_sigma.component(s))?;
            let hb = Hypergraph::from_structure(&b_sigma.component(s))?;
            let (ma, mb) = (downset_count(&ha), downset_count(&hb));
            let gr = GrCategory::zero();
            let gr_stage = format!("gr-search[{name}]");
            let (gr_n, report) = stage!(
                trace,
                &gr_stage,
                search_witness(
                    &gr,
                    &ma,
                    &mb,
                    colors,
                    mb..=mb + opts.search_span,
                    opts.mode,
                    limits
                )
            );
            trace.push(
                &gr_stage,
                Some(Verification::Exhaustive),
                json!({"colors": colors, "m_a": ma, "m_b": mb, "n": gr_n, "nodes": report.stats.nodes}),
            );

            let pa = HypergraphGr::new(ha.uniformity(), limits.hom_cap);
            let phi_stage = format!("phi[{name}]");
            let t = stage!(
                trace,
                &phi_stage,
                transfer_preadjunction(&pa, &ha, &hb, &gr_n, colors, opts)
            );
            trace.push(
                &phi_stage,
                Some(t.verification),
                json!({
                    "vertices": t.witness.size(),
                    "edges": t.witness.edges().len(),
                    "square_checks": t.square_checks,
                    "colorings": t.colorings_checked.to_string(),
                }),
            );
            let c_s = t.witness.to_structure_named(&name);
            let rel = RelCategory::new(c_s.signature().clone());
            let hom = stage!(
                trace,
                "product",
                enumerate_hom(&rel, &a_sigma.component(s), &c_s, limits.hom_cap)
            );
            positions.push(hom.len());
            components.push(c_s);
        }

        let cats: Vec<RelCategory> = components
            .iter()
            .map(|c| RelCategory::new(c.signature().clone()))
            .collect();
        let a_bar: Vec<OrderedStructure> = (0..n).map(|s| a_sigma.component(s)).collect();
        let b_bar: Vec<OrderedStructure> = (0..n).map(|s| b_sigma.component(s)).collect();
        let p = stage!(
            trace,
            "product",
            product_arrow(&cats, &a_bar, &b_bar, &components, k, opts)
        );
        trace.push(
            "product",
            Some(p.verification),
            json!({
                "factor_colors": p.factor_colors,
                "positions": p.positions().len(),
                "colorings": p.colorings_checked.to_string(),
            }),
        );

        let sub = stage!(
            trace,
            "subcategory",
            subcategory_transfer(&a_sigma, &b_sigma, &components, k, opts)
        );
        trace.push(
            "subcategory",
            Some(sub.verification),
            json!({
                "size": sub.d.size(),
                "legs": sub.legs.len(),
                "diagram_arrows": sub.diagram_arrows,
                "colorings": sub.colorings_checked.to_string(),
            }),
        );
        sub.d
    };

    let expanded = expand_witness(&c_sigma, &reduction, bd.signature())?;
    trace.push("expand", None, json!({"size": expanded.size()}));
    let c = star(&expanded)?;
    trace.push("star", None, json!({"witness": structure_to_value(&c)}));

    let rel = RelCategory::new(b.signature().clone());
    let final_check = match verify_arrow(&rel, a, b, &c, k, opts.mode, limits) {
        Ok(report) => match report.verdict {
            Verdict::Witnessed => Verification::Exhaustive,
            Verdict::Refuted(_) => {
                return Err(TransferError::DecodingFailed(
                    "the assembled witness is refuted directly".into(),
                ))
            }
            Verdict::BudgetExceeded => Verification::BudgetExceeded,
        },
        Err(CategoryError::SizeLimitExceeded { .. }) => Verification::BudgetExceeded,
        Err(e) => return Err(e.into()),
    };
    let positions = enumerate_hom(&rel, a, &c, limits.hom_cap)
        .map(|h| h.len())
        .ok();
    trace.push(
        "direct-check",
        Some(final_check),
        json!({"positions": positions}),
    );
    Ok(PipelineTrace {
        stages: trace.stages,
        outcome: PipelineOutcome::Witness(c),
    })
}
