//! Pulling Ramsey witnesses back along a pre-adjunction.
//!
//! Given `C → (F(D))^{F(E)}_k` upstairs, `G(C) → (D)^E_k` downstairs: a
//! coloring `χ` of `hom(E, G(C))` induces `χ'(u) = χ(Φ(u))` on
//! `hom(F(E), C)`; a `χ'`-monochromatic `u · hom(F(E), F(D))` yields the
//! `χ`-monochromatic `Φ(u) · hom(E, D)`.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_colorings, require_witnessed, TransferError, TransferOptions, Verification};
use crate::fincat::{
    copy_system, enumerate_hom, verify_arrow_with, ArrowStats, Category, CopySystem,
};

/// Object maps `F: Ob(Lower) → Ob(Upper)`, `G: Ob(Upper) → Ob(Lower)` and
/// hom maps `Φ_{Y,X}: hom(F(Y), X) → hom(Y, G(X))` such that for every
/// `f: E → D` there is a `v = lift(f)` with `Φ(u) ∘ f == Φ(u ∘ v)`.
pub trait PreAdjunction {
    /// The category already known to have witnesses.
    type Upper: Category;
    /// The category witnesses are transferred to.
    type Lower: Category;

    fn upper(&self) -> &Self::Upper;
    fn lower(&self) -> &Self::Lower;

    fn f_obj(&self, y: &<Self::Lower as Category>::Object) -> <Self::Upper as Category>::Object;

    fn g_obj(
        &self,
        x: &<Self::Upper as Category>::Object,
    ) -> Result<<Self::Lower as Category>::Object, TransferError>;

    fn phi(
        &self,
        y: &<Self::Lower as Category>::Object,
        x: &<Self::Upper as Category>::Object,
        u: &<Self::Upper as Category>::Morphism,
    ) -> Result<<Self::Lower as Category>::Morphism, TransferError>;

    /// The `v` of the square for `f: e → d`.
    fn lift(
        &self,
        e: &<Self::Lower as Category>::Object,
        d: &<Self::Lower as Category>::Object,
        f: &<Self::Lower as Category>::Morphism,
    ) -> Result<<Self::Upper as Category>::Morphism, TransferError>;
}

type LowerObject<P> = <<P as PreAdjunction>::Lower as Category>::Object;
type LowerMorphism<P> = <<P as PreAdjunction>::Lower as Category>::Morphism;
type UpperObject<P> = <<P as PreAdjunction>::Upper as Category>::Object;
type UpperMorphism<P> = <<P as PreAdjunction>::Upper as Category>::Morphism;

/// A witness `G(C)` downstairs with its decoding.
pub struct PreadjunctionTransfer<'a, P: PreAdjunction> {
    pa: &'a P,
    pub witness: LowerObject<P>,
    pub upper_witness: UpperObject<P>,
    pub upper_stats: ArrowStats,
    /// `(u, f)` pairs checked against the square.
    pub square_checks: u64,
    pub verification: Verification,
    pub colorings_checked: u128,
    d: LowerObject<P>,
    upper: CopySystem<UpperMorphism<P>>,
    /// `hom(E, G(C))`, canonically ordered.
    positions: Vec<LowerMorphism<P>>,
    index: HashMap<LowerMorphism<P>, usize>,
    /// Position of `Φ(u)` for each upstairs position `u`.
    pull: Vec<usize>,
    ed: Vec<LowerMorphism<P>>,
}

impl<P: PreAdjunction> PreadjunctionTransfer<'_, P> {
    /// `hom(E, G(C))` in canonical order; colorings are aligned with it.
    pub fn positions(&self) -> &[LowerMorphism<P>] {
        &self.positions
    }

    /// A `w: D → G(C)` with `w · hom(E, D)` monochromatic under `colors`,
    /// checked directly before it is returned.
    pub fn decode(&self, colors: &[u32]) -> Result<(LowerMorphism<P>, u32), TransferError> {
        let pulled: Vec<u32> = self.pull.iter().map(|&i| colors[i]).collect();
        let copy = self.upper.monochromatic_copy(&pulled).ok_or_else(|| {
            TransferError::DecodingFailed("pulled-back coloring has no monochromatic copy".into())
        })?;
        let u = self.upper.witness(copy);
        let w = self.pa.phi(&self.d, &self.upper_witness, u)?;
        let mut color = None;
        for f in &self.ed {
            let g = self.pa.lower().compose(&w, f)?;
            let c = colors[*self.index.get(&g).ok_or_else(|| {
                TransferError::DecodingFailed(format!("{g:?} is not in hom(E, G(C))"))
            })?];
            match color {
                None => color = Some(c),
                Some(prev) if prev != c => {
                    return Err(TransferError::DecodingFailed(format!(
                        "{w:?} meets colors {prev} and {c}"
                    )))
                }
                Some(_) => {}
            }
        }
        Ok((w, color.expect("hom(E, D) is nonempty")))
    }
}

/// Transfers the upstairs witness `c` for `F(E) → F(D)` to `G(c)` for
/// `E → D`, spot-checks the square and re-checks the decoding on colorings.
pub fn transfer_preadjunction<'a, P: PreAdjunction>(
    pa: &'a P,
    e: &LowerObject<P>,
    d: &LowerObject<P>,
    c: &UpperObject<P>,
    k: u32,
    opts: &TransferOptions,
) -> Result<PreadjunctionTransfer<'a, P>, TransferError> {
    let upper = pa.upper();
    let lower = pa.lower();
    let limits = &opts.limits;
    let (fe, fd) = (pa.f_obj(e), pa.f_obj(d));
    let upper_system = copy_system(upper, &fe, &fd, c, limits)?;
    let report = verify_arrow_with(&upper_system, k, opts.mode, limits)?;
    require_witnessed(&report, "source arrow")?;

    let gc = pa.g_obj(c)?;
    let ed = enumerate_hom(lower, e, d, limits.hom_cap)?;
    if ed.is_empty() {
        return Err(crate::fincat::CategoryError::EmptyHom.into());
    }

    // the square, on all or a seeded sample of u ∈ hom(F(D), C)
    let mut us = enumerate_hom(upper, &fd, c, limits.hom_cap)?;
    let pairs = us.len().saturating_mul(ed.len());
    if pairs > opts.square_checks {
        let keep = (opts.square_checks / ed.len()).max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        us.shuffle(&mut rng);
        us.truncate(keep);
    }
    let lifts: Vec<_> = ed
        .iter()
        .map(|f| pa.lift(e, d, f))
        .collect::<Result<_, _>>()?;
    let mut square_checks = 0u64;
    for u in &us {
        let phi_u = pa.phi(d, c, u)?;
        for (f, v) in ed.iter().zip(&lifts) {
            let left = lower.compose(&phi_u, f)?;
            let right = pa.phi(e, c, &upper.compose(u, v)?)?;
            if left != right {
                return Err(TransferError::PreAdjunctionViolated(format!(
                    "u = {u:?}, f = {f:?}"
                )));
            }
            square_checks += 1;
        }
    }

    let positions = enumerate_hom(lower, e, &gc, limits.hom_cap)?;
    let index: HashMap<LowerMorphism<P>, usize> = positions
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();
    let pull = upper_system
        .positions()
        .iter()
        .map(|u| {
            let image = pa.phi(e, c, u)?;
            index.get(&image).copied().ok_or_else(|| {
                TransferError::DecodingFailed(format!("Φ(u) = {image:?} is not in hom(E, G(C))"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = PreadjunctionTransfer {
        pa,
        witness: gc,
        upper_witness: c.clone(),
        upper_stats: report.stats,
        square_checks,
        verification: Verification::Exhaustive,
        colorings_checked: 0,
        d: d.clone(),
        upper: upper_system,
        positions,
        index,
        pull,
        ed,
    };
    let (verification, checked) = check_colorings(out.positions.len(), k, opts, |colors| {
        out.decode(colors).map(|_| ())
    })?;
    out.verification = verification;
    out.colorings_checked = checked;
    Ok(out)
}
