//! Certificates: canonical JSON records of a construction that can be
//! replayed from their own contents.
//!
//! ```json
//! {"config":{..},"construction":{"input":{..},..},"inputs":{"a":"<sha256>"},
//!  "seed":0,"stage":"dagger","verification":"exhaustive"}
//! ```
//!
//! `construction.input` holds every input in canonical form and `inputs`
//! their hashes. [`check`] recomputes the construction under the recorded
//! config and compares it with the stored one, field by field.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::canon;
use crate::fincat::{
    enumerate_hom, find_monochromatic, verify_arrow, Category, CategoryError, Coloring, GrCategory,
    HyperCategory, Limits, Mode, RelCategory, Verdict,
};
use crate::ordstruct::json::{
    embedding_from_value, embedding_to_value, hypergraph_from_value, hypergraph_to_value,
    parse_structure, rel_from_value, rel_hash, structure_to_value, FormatError,
};
use crate::ordstruct::{check_embedding, gr_target_hypergraph, AnyStructure, OrderedStructure};
use crate::paramwords::{enumerate_words, ParamWord, WordError};
use crate::transfer::{
    dagger, downset_count, lift_word, nesetril_rodl_pipeline, phi_sets, product_arrow,
    sigma_reduce, star, subcategory_transfer, PipelineOutcome, Remap, TransferError,
    TransferOptions, Verification,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertError {
    #[error("malformed certificate or input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Word(#[from] WordError),
}

impl CertError {
    /// The error only says that a limit was reached.
    pub fn is_budget(&self) -> bool {
        match self {
            CertError::Category(e) => category_budget(e),
            CertError::Transfer(TransferError::Category(e)) => category_budget(e),
            CertError::Transfer(
                TransferError::BudgetExceeded { .. } | TransferError::TooManyColors { .. },
            ) => true,
            CertError::Transfer(TransferError::Word(WordError::SizeLimitExceeded { .. }))
            | CertError::Word(WordError::SizeLimitExceeded { .. }) => true,
            _ => false,
        }
    }
}

fn category_budget(e: &CategoryError) -> bool {
    matches!(
        e,
        CategoryError::BudgetExceeded { .. } | CategoryError::SizeLimitExceeded { .. }
    )
}

fn malformed(msg: impl Into<String>) -> CertError {
    CertError::Malformed(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Verify,
    Phi,
    Lift,
    Product,
    Closure,
    Dagger,
    Star,
    SigmaReduce,
    Pipeline,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Verify,
        Stage::Phi,
        Stage::Lift,
        Stage::Product,
        Stage::Closure,
        Stage::Dagger,
        Stage::Star,
        Stage::SigmaReduce,
        Stage::Pipeline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Verify => "verify",
            Stage::Phi => "phi",
            Stage::Lift => "lift",
            Stage::Product => "product",
            Stage::Closure => "closure",
            Stage::Dagger => "dagger",
            Stage::Star => "star",
            Stage::SigmaReduce => "sigma-reduce",
            Stage::Pipeline => "pipeline",
        }
    }

    pub fn parse(name: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Caps, search mode and seed of a run; recorded in every certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub cap_hom: usize,
    pub cap_nodes: u64,
    pub cap_colorings: u64,
    pub mode: Mode,
    pub seed: u64,
    pub jobs: usize,
    pub samples: usize,
    pub max_exhaustive: u64,
    pub search_span: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let limits = Limits::default();
        let opts = TransferOptions::default();
        Self {
            cap_hom: limits.hom_cap,
            cap_nodes: limits.node_cap,
            cap_colorings: limits.coloring_cap as u64,
            mode: opts.mode,
            seed: opts.seed,
            jobs: limits.jobs,
            samples: opts.samples,
            max_exhaustive: opts.max_exhaustive as u64,
            search_span: opts.search_span,
        }
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exhaustive => "exhaustive",
        Mode::Backtrack => "backtrack",
    }
}

pub fn parse_mode(name: &str) -> Option<Mode> {
    match name {
        "exhaustive" => Some(Mode::Exhaustive),
        "backtrack" => Some(Mode::Backtrack),
        _ => None,
    }
}

impl RunConfig {
    pub fn limits(&self) -> Limits {
        Limits {
            hom_cap: self.cap_hom,
            node_cap: self.cap_nodes,
            coloring_cap: self.cap_colorings as u128,
            jobs: self.jobs.max(1),
            ..Limits::default()
        }
    }

    pub fn transfer_options(&self) -> TransferOptions {
        TransferOptions {
            mode: self.mode,
            limits: self.limits(),
            seed: self.seed,
            samples: self.samples,
            max_exhaustive: self.max_exhaustive as u128,
            search_span: self.search_span,
            ..TransferOptions::default()
        }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "cap_hom": self.cap_hom,
            "cap_nodes": self.cap_nodes,
            "cap_colorings": self.cap_colorings,
            "mode": mode_name(self.mode),
            "seed": self.seed,
            "jobs": self.jobs,
            "samples": self.samples,
            "max_exhaustive": self.max_exhaustive,
            "search_span": self.search_span,
        })
    }

    pub fn from_value(v: &Value) -> Result<Self, CertError> {
        let u = |key: &str| -> Result<u64, CertError> {
            v.get(key)
                .and_then(Value::as_u64)
                .ok_or_else(|| malformed(format!("config.{key} must be a non-negative integer")))
        };
        let mode = v
            .get("mode")
            .and_then(Value::as_str)
            .and_then(parse_mode)
            .ok_or_else(|| malformed("config.mode must be `exhaustive` or `backtrack`"))?;
        Ok(Self {
            cap_hom: u("cap_hom")? as usize,
            cap_nodes: u("cap_nodes")?,
            cap_colorings: u("cap_colorings")?,
            mode,
            seed: u("seed")?,
            jobs: u("jobs")? as usize,
            samples: u("samples")? as usize,
            max_exhaustive: u("max_exhaustive")?,
            search_span: u("search_span")? as usize,
        })
    }
}

fn field<'a>(input: &'a Value, key: &str) -> Result<&'a Value, CertError> {
    input
        .get(key)
        .ok_or_else(|| malformed(format!("missing input `{key}`")))
}

fn colors_field(input: &Value) -> Result<u32, CertError> {
    field(input, "k")?
        .as_u64()
        .and_then(|k| u32::try_from(k).ok())
        .ok_or_else(|| malformed("`k` must be a positive integer"))
}

fn rel_input(input: &Value, key: &str) -> Result<OrderedStructure, CertError> {
    Ok(match parse_structure(field(input, key)?)? {
        AnyStructure::Rel(s) => s,
        AnyStructure::Hyper(h) => h.to_structure(),
    })
}

/// The result of running a stage: canonical inputs, construction, and how
/// its claims were verified.
struct Built {
    input: Value,
    construction: Map<String, Value>,
    verification: String,
}

/// Runs `stage` on `input` and wraps the result in a certificate.
pub fn build(stage: Stage, input: &Value, config: &RunConfig) -> Result<Value, CertError> {
    let built = run_stage(stage, input, config)?;
    Ok(assemble(stage, built, config))
}

fn assemble(stage: Stage, built: Built, config: &RunConfig) -> Value {
    let mut inputs = Map::new();
    if let Some(obj) = built.input.as_object() {
        for (key, value) in obj {
            inputs.insert(key.clone(), Value::from(canon::hash_value(value)));
        }
    }
    let mut construction = built.construction;
    construction.insert("input".into(), built.input);
    json!({
        "stage": stage.name(),
        "inputs": inputs,
        "construction": construction,
        "verification": built.verification,
        "seed": config.seed,
        "config": config.to_value(),
    })
}

fn run_stage(stage: Stage, input: &Value, config: &RunConfig) -> Result<Built, CertError> {
    match stage {
        Stage::Verify => run_verify(input, config),
        Stage::Phi => run_phi(input, config),
        Stage::Lift => run_lift(input, config),
        Stage::Product => run_product(input, config),
        Stage::Closure => run_closure(input, config),
        Stage::Dagger => {
            let a = rel_input(input, "a")?;
            let out = dagger(&a);
            let back = star(&out)?;
            Ok(Built {
                input: json!({"a": structure_to_value(&a)}),
                construction: obj(json!({
                    "output": structure_to_value(&out),
                    "absolutely_ordered": out.is_absolutely_ordered(),
                    "star_hash": rel_hash(&back),
                })),
                verification: Verification::Exhaustive.to_string(),
            })
        }
        Stage::Star => {
            let b = rel_input(input, "b")?;
            let out = star(&b)?;
            Ok(Built {
                input: json!({"b": structure_to_value(&b)}),
                construction: obj(json!({
                    "output": structure_to_value(&out),
                    "dagger_hash": rel_hash(&dagger(&out)),
                })),
                verification: Verification::Exhaustive.to_string(),
            })
        }
        Stage::SigmaReduce => {
            let a = rel_input(input, "a")?;
            let b = rel_input(input, "b")?;
            let red = sigma_reduce(&a, &b)?;
            let sigma: Vec<Value> = red
                .sigma
                .symbols()
                .iter()
                .map(|(n, r)| json!([n, r]))
                .collect();
            let remap: Vec<Value> = red
                .remap
                .iter()
                .map(|(n, r)| match r {
                    Remap::Empty => json!([n, null]),
                    Remap::Same(s) => json!([n, s]),
                })
                .collect();
            Ok(Built {
                input: json!({"a": structure_to_value(&a), "b": structure_to_value(&b)}),
                construction: obj(json!({"sigma": sigma, "remap": remap})),
                verification: Verification::Exhaustive.to_string(),
            })
        }
        Stage::Pipeline => {
            let a = rel_input(input, "a")?;
            let b = rel_input(input, "b")?;
            let k = colors_field(input)?;
            let trace = nesetril_rodl_pipeline(&a, &b, k, &config.transfer_options())?;
            let verification = match &trace.outcome {
                PipelineOutcome::Witness(_) => trace
                    .stages
                    .last()
                    .and_then(|s| s.verification)
                    .unwrap_or(Verification::Exhaustive),
                PipelineOutcome::BudgetExceeded { .. } => Verification::BudgetExceeded,
            };
            Ok(Built {
                input: json!({"a": structure_to_value(&a), "b": structure_to_value(&b), "k": k}),
                construction: obj(json!({"trace": trace.to_value()})),
                verification: verification.to_string(),
            })
        }
    }
}

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("constructions are objects"),
    }
}

fn run_verify(input: &Value, config: &RunConfig) -> Result<Built, CertError> {
    let k = colors_field(input)?;
    let parsed: Vec<AnyStructure> = ["a", "b", "c"]
        .iter()
        .map(|key| Ok(parse_structure(field(input, key)?)?))
        .collect::<Result<_, CertError>>()?;
    let canonical = json!({
        "a": crate::ordstruct::json::to_value(&parsed[0]),
        "b": crate::ordstruct::json::to_value(&parsed[1]),
        "c": crate::ordstruct::json::to_value(&parsed[2]),
        "k": k,
    });
    let limits = config.limits();
    let construction = match (&parsed[0], &parsed[1], &parsed[2]) {
        (AnyStructure::Hyper(a), AnyStructure::Hyper(b), AnyStructure::Hyper(c)) => {
            let cat = HyperCategory::new(b.uniformity());
            verify_construction(&cat, a, b, c, k, config.mode, &limits)?
        }
        (AnyStructure::Rel(a), AnyStructure::Rel(b), AnyStructure::Rel(c)) => {
            let cat = RelCategory::new(b.signature().clone());
            verify_construction(&cat, a, b, c, k, config.mode, &limits)?
        }
        _ => {
            return Err(
                FormatError::Structure(crate::ordstruct::StructureError::KindMismatch).into(),
            )
        }
    };
    let verification = if construction["verdict"] == "budget-exceeded" {
        Verification::BudgetExceeded
    } else {
        Verification::Exhaustive
    };
    Ok(Built {
        input: canonical,
        construction,
        verification: verification.to_string(),
    })
}

fn verify_construction<C: Category>(
    cat: &C,
    a: &C::Object,
    b: &C::Object,
    c: &C::Object,
    k: u32,
    mode: Mode,
    limits: &Limits,
) -> Result<Map<String, Value>, CertError> {
    let report = verify_arrow(cat, a, b, c, k, mode, limits)?;
    let (verdict, coloring) = match &report.verdict {
        Verdict::Witnessed => ("witnessed", Value::Null),
        Verdict::Refuted(col) => ("refuted", Value::from(col.colors.clone())),
        Verdict::BudgetExceeded => ("budget-exceeded", Value::Null),
    };
    let mut m = obj(json!({
        "verdict": verdict,
        "coloring": coloring,
        "positions": report.stats.positions,
        "copies": report.stats.copies,
        "deterministic": report.deterministic,
    }));
    if report.deterministic {
        m.insert("nodes".into(), Value::from(report.stats.nodes));
    }
    Ok(m)
}

/// Independent replay of a refutation: no `w ∈ hom(B, C)` is monochromatic.
fn coloring_is_bad(input: &Value, colors: &[u32], config: &RunConfig) -> Result<bool, CertError> {
    fn run<C: Category>(
        cat: &C,
        a: &C::Object,
        b: &C::Object,
        c: &C::Object,
        k: u32,
        colors: &[u32],
        cap: usize,
    ) -> Result<bool, CertError> {
        let domain = enumerate_hom(cat, a, c, cap)?;
        if domain.len() != colors.len() || colors.iter().any(|&x| x == 0 || x > k) {
            return Ok(false);
        }
        let coloring = Coloring {
            domain,
            colors: colors.to_vec(),
        };
        Ok(find_monochromatic(cat, a, b, c, &coloring, cap)?.is_none())
    }
    let k = colors_field(input)?;
    let get = |key| -> Result<AnyStructure, CertError> { Ok(parse_structure(field(input, key)?)?) };
    match (get("a")?, get("b")?, get("c")?) {
        (AnyStructure::Hyper(a), AnyStructure::Hyper(b), AnyStructure::Hyper(c)) => run(
            &HyperCategory::new(b.uniformity()),
            &a,
            &b,
            &c,
            k,
            colors,
            config.cap_hom,
        ),
        (AnyStructure::Rel(a), AnyStructure::Rel(b), AnyStructure::Rel(c)) => run(
            &RelCategory::new(b.signature().clone()),
            &a,
            &b,
            &c,
            k,
            colors,
            config.cap_hom,
        ),
        _ => Err(malformed("mixed structure kinds")),
    }
}

fn run_phi(input: &Value, config: &RunConfig) -> Result<Built, CertError> {
    let h = hypergraph_from_value(field(input, "h")?)?;
    let text = field(input, "u")?
        .as_str()
        .ok_or_else(|| malformed("`u` must be a word such as \"x1 0 x2\""))?;
    let u = ParamWord::parse(Arc::clone(GrCategory::zero().alphabet()), text)?;
    let sets = phi_sets(&h, &u)?;
    let target = gr_target_hypergraph(u.len(), h.uniformity(), config.cap_hom)
        .map_err(TransferError::from)?;
    let (f, check) = crate::transfer::hgr::phi_checked(&h, &target, &u)?;
    Ok(Built {
        input: json!({"h": hypergraph_to_value(&h), "u": u.to_string()}),
        construction: obj(json!({
            "n": u.len(),
            "sets": sets,
            "embedding": embedding_to_value(&f),
            "checks": {
                "injective": check.injective,
                "order": check.order_preserving,
                "edges_preserved": check.preserves,
                "edges_reflected": check.reflects,
            },
            "target": {
                "vertices": target.hypergraph().size(),
                "edges": target.hypergraph().edges().len(),
            },
        })),
        verification: if check.holds() {
            Verification::Exhaustive.to_string()
        } else {
            return Err(TransferError::EmbeddingCheckFailed(format!("{check:?}")).into());
        },
    })
}

fn run_lift(input: &Value, config: &RunConfig) -> Result<Built, CertError> {
    let a = hypergraph_from_value(field(input, "a")?)?;
    let b = hypergraph_from_value(field(input, "b")?)?;
    let f = embedding_from_value(field(input, "f")?)?;
    let h = lift_word(&f, &a, &b)?;
    let gr = GrCategory::zero();
    let m = downset_count(&a);
    let mut checks = 0u64;
    for n in [m, m + 1] {
        let target =
            gr_target_hypergraph(n, a.uniformity(), config.cap_hom).map_err(TransferError::from)?;
        for u in enumerate_words(gr.alphabet(), n, m, config.cap_hom)? {
            let left = crate::transfer::phi_with_target(&a, &target, &u)?
                .after(&f)
                .ok_or(TransferError::NotAnEmbedding)?;
            let right = crate::transfer::phi_with_target(&b, &target, &gr.compose(&u, &h)?)?;
            if left != right {
                return Err(TransferError::PreAdjunctionViolated(format!("u = {u}")).into());
            }
            checks += 1;
        }
    }
    Ok(Built {
        input: json!({
            "a": hypergraph_to_value(&a),
            "b": hypergraph_to_value(&b),
            "f": embedding_to_value(&f),
        }),
        construction: obj(json!({"word": h.to_string(), "square_checks": checks})),
        verification: Verification::Exhaustive.to_string(),
    })
}

fn run_product(input: &Value, config: &RunConfig) -> Result<Built, CertError> {
    let k = colors_field(input)?;
    let factors = field(input, "factors")?
        .as_array()
        .ok_or_else(|| malformed("`factors` must be an array of {a, b, c}"))?;
    let (mut a, mut b, mut c, mut cats, mut canonical) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for factor in factors {
        let (fa, fb, fc) = (
            rel_input(factor, "a")?,
            rel_input(factor, "b")?,
            rel_input(factor, "c")?,
        );
        canonical.push(json!({
            "a": structure_to_value(&fa),
            "b": structure_to_value(&fb),
            "c": structure_to_value(&fc),
        }));
        cats.push(RelCategory::new(fb.signature().clone()));
        a.push(fa);
        b.push(fb);
        c.push(fc);
    }
    let p = product_arrow(&cats, &a, &b, &c, k, &config.transfer_options())?;
    Ok(Built {
        input: json!({"factors": canonical, "k": k}),
        construction: obj(json!({
            "factor_colors": p.factor_colors,
            "positions": p.positions().len(),
            "colorings": p.colorings_checked.to_string(),
        })),
        verification: p.verification.to_string(),
    })
}

fn run_closure(input: &Value, config: &RunConfig) -> Result<Built, CertError> {
    let k = colors_field(input)?;
    let a = rel_input(input, "a")?;
    let b = rel_input(input, "b")?;
    let apex = field(input, "apex")?
        .as_array()
        .ok_or_else(|| malformed("`apex` must be an array of structures"))?
        .iter()
        .map(|v| Ok(rel_from_value(v)?))
        .collect::<Result<Vec<_>, CertError>>()?;
    let t = subcategory_transfer(&a, &b, &apex, k, &config.transfer_options())?;
    let legs: Vec<&[usize]> = t.legs.iter().map(|f| f.map()).collect();
    Ok(Built {
        input: json!({
            "a": structure_to_value(&a),
            "b": structure_to_value(&b),
            "apex": apex.iter().map(structure_to_value).collect::<Vec<_>>(),
            "k": k,
        }),
        construction: obj(json!({
            "d": structure_to_value(&t.d),
            "legs": legs,
            "diagram_arrows": t.diagram_arrows,
            "colorings": t.colorings_checked.to_string(),
        })),
        verification: t.verification.to_string(),
    })
}

/// Outcome of replaying a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckOutcome {
    /// Every claim replays.
    Replayed,
    /// The first claim that does not replay.
    Failed { claim: String, detail: String },
    /// A claim cannot be replayed within the recorded caps.
    Unreplayable(String),
}

impl CheckOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            CheckOutcome::Replayed => 0,
            CheckOutcome::Failed { .. } => 1,
            CheckOutcome::Unreplayable(_) => 2,
        }
    }
}

fn failed(claim: impl Into<String>, detail: impl Into<String>) -> CheckOutcome {
    CheckOutcome::Failed {
        claim: claim.into(),
        detail: detail.into(),
    }
}

/// First path at which two values differ.
fn first_difference(path: &str, want: &Value, got: &Value) -> Option<String> {
    match (want, got) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            keys.into_iter()
                .find_map(|key| match (x.get(key), y.get(key)) {
                    (Some(p), Some(q)) => first_difference(&format!("{path}.{key}"), p, q),
                    _ => Some(format!("{path}.{key}")),
                })
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Some(format!("{path}.length"));
            }
            x.iter()
                .zip(y)
                .enumerate()
                .find_map(|(i, (p, q))| first_difference(&format!("{path}[{i}]"), p, q))
        }
        _ if want == got => None,
        _ => Some(path.to_string()),
    }
}

/// Replays every claim of `cert`. Errors mean the certificate is not even
/// well formed.
pub fn check(cert: &Value) -> Result<CheckOutcome, CertError> {
    let stage = cert
        .get("stage")
        .and_then(Value::as_str)
        .and_then(Stage::parse)
        .ok_or_else(|| malformed("`stage` is missing or unknown"))?;
    let config = RunConfig::from_value(
        cert.get("config")
            .ok_or_else(|| malformed("missing `config`"))?,
    )?;
    let construction = cert
        .get("construction")
        .and_then(Value::as_object)
        .ok_or_else(|| malformed("missing `construction`"))?;
    let input = construction
        .get("input")
        .ok_or_else(|| malformed("missing `construction.input`"))?;
    let inputs = cert
        .get("inputs")
        .and_then(Value::as_object)
        .ok_or_else(|| malformed("missing `inputs`"))?;
    let claimed = cert
        .get("verification")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("missing `verification`"))?;

    if cert.get("seed").and_then(Value::as_u64) != Some(config.seed) {
        return Ok(failed("seed", "differs from config.seed"));
    }
    let input_obj = input
        .as_object()
        .ok_or_else(|| malformed("`construction.input` must be an object"))?;
    for (key, value) in input_obj {
        if inputs.get(key).and_then(Value::as_str) != Some(canon::hash_value(value).as_str()) {
            return Ok(failed(
                format!("inputs.{key}"),
                "hash does not match the recorded input",
            ));
        }
    }
    if inputs.len() != input_obj.len() {
        return Ok(failed("inputs", "hash list and recorded inputs differ"));
    }

    let replay = match build(stage, input, &config) {
        Ok(v) => v,
        Err(e) if e.is_budget() => return Ok(CheckOutcome::Unreplayable(e.to_string())),
        Err(CertError::Malformed(m)) => return Err(CertError::Malformed(m)),
        Err(CertError::Format(e)) => return Err(CertError::Format(e)),
        Err(e) => return Ok(failed("construction", e.to_string())),
    };
    let replayed = replay["verification"].as_str().unwrap_or_default();
    if claimed != replayed {
        if claimed == "exhaustive" {
            return Ok(CheckOutcome::Unreplayable(format!(
                "claims exhaustive verification, replay under the recorded caps gives {replayed}"
            )));
        }
        return Ok(failed(
            "verification",
            format!("claimed {claimed}, replay gives {replayed}"),
        ));
    }

    let mut want = Value::Object(construction.clone());
    let mut got = replay["construction"].clone();
    if stage == Stage::Verify {
        if let Some(colors) = want.get("coloring").and_then(Value::as_array) {
            let colors: Vec<u32> = colors
                .iter()
                .map(|c| c.as_u64().map(|c| c as u32).unwrap_or(0))
                .collect();
            match coloring_is_bad(input, &colors, &config) {
                Ok(true) => {}
                Ok(false) => {
                    return Ok(failed(
                        "construction.coloring",
                        "the coloring has a monochromatic copy",
                    ))
                }
                Err(e) if e.is_budget() => return Ok(CheckOutcome::Unreplayable(e.to_string())),
                Err(e) => return Ok(failed("construction.coloring", e.to_string())),
            }
        }
        if want.get("deterministic") == Some(&Value::Bool(false)) {
            // a parallel search may find any bad coloring
            for v in [&mut want, &mut got] {
                if let Some(m) = v.as_object_mut() {
                    m.remove("coloring");
                    m.remove("nodes");
                }
            }
        }
    }
    if let Some(path) = first_difference("construction", &want, &got) {
        return Ok(failed(path, "does not match the replay"));
    }
    match stage {
        Stage::Dagger if construction.get("star_hash") != inputs.get("a") => Ok(failed(
            "construction.star_hash",
            "star of the output is not the input",
        )),
        Stage::Star if construction.get("dagger_hash") != inputs.get("b") => Ok(failed(
            "construction.dagger_hash",
            "dagger of the output is not the input",
        )),
        Stage::Phi
            if !construction
                .get("checks")
                .and_then(Value::as_object)
                .is_some_and(|m| m.values().all(|v| v == &Value::Bool(true))) =>
        {
            Ok(failed("construction.checks", "Φ(u) is not an embedding"))
        }
        _ => Ok(CheckOutcome::Replayed),
    }
}

/// Checks that a closure certificate's legs embed `b` into `d`; used by
/// tests and the CLI as an extra claim independent of the replay.
pub fn closure_legs_embed(cert: &Value) -> Result<bool, CertError> {
    let construction = &cert["construction"];
    let b = rel_from_value(&construction["input"]["b"])?;
    let d = rel_from_value(&construction["d"])?;
    let legs = construction["legs"]
        .as_array()
        .ok_or_else(|| malformed("`legs` must be an array"))?;
    for leg in legs {
        let map: Vec<usize> =
            serde_json::from_value(leg.clone()).map_err(|e| malformed(e.to_string()))?;
        let f = crate::ordstruct::Embedding::new(map, d.size()).map_err(FormatError::from)?;
        if !check_embedding(&b, &d, &f).holds() {
            return Ok(false);
        }
    }
    Ok(d.is_absolutely_ordered())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Value {
        structure_to_value(&OrderedStructure::chain(n))
    }

    fn pair() -> Value {
        json!({"kind":"rel","signature":[{"name":"R","arity":2}],"size":2,"relations":{"R":[[2,1]]}})
    }

    #[test]
    fn dagger_certificate_replays_and_inverts() {
        let cert = build(Stage::Dagger, &json!({"a": pair()}), &RunConfig::default()).unwrap();
        assert_eq!(cert["construction"]["star_hash"], cert["inputs"]["a"]);
        assert_eq!(check(&cert).unwrap(), CheckOutcome::Replayed);
    }

    #[test]
    fn verify_certificates() {
        let cfg = RunConfig::default();
        let ok = build(
            Stage::Verify,
            &json!({"a": chain(1), "b": chain(2), "c": chain(3), "k": 2}),
            &cfg,
        )
        .unwrap();
        assert_eq!(ok["construction"]["verdict"], "witnessed");
        assert_eq!(check(&ok).unwrap(), CheckOutcome::Replayed);

        let mut bad = build(
            Stage::Verify,
            &json!({"a": chain(1), "b": chain(2), "c": chain(2), "k": 2}),
            &cfg,
        )
        .unwrap();
        assert_eq!(bad["construction"]["coloring"], json!([1, 2]));
        assert_eq!(check(&bad).unwrap(), CheckOutcome::Replayed);
        bad["construction"]["coloring"][0] = json!(2);
        assert!(matches!(
            check(&bad).unwrap(),
            CheckOutcome::Failed { claim, .. } if claim == "construction.coloring"
        ));
    }

    #[test]
    fn tampering_is_located() {
        let mut cert = build(Stage::Dagger, &json!({"a": pair()}), &RunConfig::default()).unwrap();
        cert["construction"]["input"]["a"]["size"] = json!(3);
        assert!(matches!(
            check(&cert).unwrap(),
            CheckOutcome::Failed { claim, .. } if claim == "inputs.a"
        ));
    }

    #[test]
    fn exhaustive_claim_beyond_caps_is_unreplayable() {
        let cfg = RunConfig {
            max_exhaustive: 4,
            samples: 8,
            ..RunConfig::default()
        };
        let input = json!({"factors": [
            {"a": chain(1), "b": chain(2), "c": chain(3)},
            {"a": chain(1), "b": chain(1), "c": chain(1)},
        ], "k": 2});
        let mut cert = build(Stage::Product, &input, &cfg).unwrap();
        assert_eq!(cert["verification"], "sampled(0)");
        assert_eq!(check(&cert).unwrap(), CheckOutcome::Replayed);
        cert["verification"] = json!("exhaustive");
        assert_eq!(check(&cert).unwrap().exit_code(), 2);
    }

    #[test]
    fn stage_names_round_trip() {
        for s in Stage::ALL {
            assert_eq!(Stage::parse(s.name()), Some(s));
        }
        assert_eq!(Stage::parse("nope"), None);
    }
}
