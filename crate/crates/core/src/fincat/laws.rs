//! Exhaustive category-law checks over a finite list of objects.

use std::collections::HashSet;
use std::fmt;

use super::{enumerate_hom, Category, CategoryError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawViolation {
    /// `id_B ∘ f != f` for `f: A -> B` (objects given by index).
    LeftIdentity { from: usize, to: usize, f: String },
    /// `f ∘ id_A != f`.
    RightIdentity { from: usize, to: usize, f: String },
    /// `id_A` is missing from `hom(A, A)`.
    IdentityMissing { object: usize },
    /// A composite does not lie in the expected hom-set.
    NotClosed {
        from: usize,
        to: usize,
        composite: String,
    },
    /// `h ∘ (g ∘ f) != (h ∘ g) ∘ f`.
    Associativity {
        objects: [usize; 4],
        f: String,
        g: String,
        h: String,
    },
    /// `f ∘ g1 == f ∘ g2` with `g1 != g2`.
    NotMonic { f: String, g1: String, g2: String },
    /// Composition of composable morphisms failed.
    ComposeFailed {
        g: String,
        f: String,
        reason: String,
    },
}

impl fmt::Display for LawViolation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LawViolation::LeftIdentity { from, to, f } => {
                write!(out, "left identity fails for {f} in hom(#{from}, #{to})")
            }
            LawViolation::RightIdentity { from, to, f } => {
                write!(out, "right identity fails for {f} in hom(#{from}, #{to})")
            }
            LawViolation::IdentityMissing { object } => {
                write!(out, "identity of #{object} is not in its hom-set")
            }
            LawViolation::NotClosed {
                from,
                to,
                composite,
            } => write!(out, "{composite} is not in hom(#{from}, #{to})"),
            LawViolation::Associativity { objects, f, g, h } => write!(
                out,
                "associativity fails on {objects:?}: f={f}, g={g}, h={h}"
            ),
            LawViolation::NotMonic { f, g1, g2 } => {
                write!(out, "{f} is not monic: it identifies {g1} and {g2}")
            }
            LawViolation::ComposeFailed { g, f, reason } => {
                write!(out, "{g} ∘ {f} failed: {reason}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LawReport {
    pub violations: Vec<LawViolation>,
    pub identity_checks: u64,
    pub associativity_checks: u64,
    pub monic_checks: u64,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks identities, closure, associativity over every composable triple and
/// monicity of every morphism, for all hom-sets among `objects`.
pub fn check_category_laws<C: Category>(
    cat: &C,
    objects: &[C::Object],
    cap: usize,
) -> Result<LawReport, CategoryError> {
    let n = objects.len();
    let mut hom = Vec::with_capacity(n);
    for a in objects {
        let mut row = Vec::with_capacity(n);
        for b in objects {
            row.push(enumerate_hom(cat, a, b, cap)?);
        }
        hom.push(row);
    }
    let sets: Vec<Vec<HashSet<&C::Morphism>>> = hom
        .iter()
        .map(|row| row.iter().map(|h| h.iter().collect()).collect())
        .collect();
    let mut report = LawReport::default();
    let show = |m: &C::Morphism| format!("{m:?}");

    let compose = |g: &C::Morphism, f: &C::Morphism, report: &mut LawReport| match cat.compose(g, f)
    {
        Ok(m) => Some(m),
        Err(e) => {
            report.violations.push(LawViolation::ComposeFailed {
                g: show(g),
                f: show(f),
                reason: e.to_string(),
            });
            None
        }
    };

    let ids: Vec<C::Morphism> = objects.iter().map(|a| cat.identity(a)).collect();
    for (i, id) in ids.iter().enumerate() {
        if !sets[i][i].contains(id) {
            report
                .violations
                .push(LawViolation::IdentityMissing { object: i });
        }
    }
    for i in 0..n {
        for j in 0..n {
            for f in &hom[i][j] {
                report.identity_checks += 1;
                if let Some(left) = compose(&ids[j], f, &mut report) {
                    if &left != f {
                        report.violations.push(LawViolation::LeftIdentity {
                            from: i,
                            to: j,
                            f: show(f),
                        });
                    }
                }
                if let Some(right) = compose(f, &ids[i], &mut report) {
                    if &right != f {
                        report.violations.push(LawViolation::RightIdentity {
                            from: i,
                            to: j,
                            f: show(f),
                        });
                    }
                }
            }
        }
    }

    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                // closure and monicity for hom(i, j) followed by hom(j, l)
                for g in &hom[j][l] {
                    let mut images: Vec<(C::Morphism, &C::Morphism)> = Vec::new();
                    for f in &hom[i][j] {
                        let Some(gf) = compose(g, f, &mut report) else {
                            continue;
                        };
                        if !sets[i][l].contains(&gf) {
                            report.violations.push(LawViolation::NotClosed {
                                from: i,
                                to: l,
                                composite: show(&gf),
                            });
                        }
                        images.push((gf, f));
                    }
                    report.monic_checks += 1;
                    let mut seen: std::collections::HashMap<&C::Morphism, &C::Morphism> =
                        std::collections::HashMap::new();
                    for (gf, f) in &images {
                        if let Some(prev) = seen.insert(gf, f) {
                            report.violations.push(LawViolation::NotMonic {
                                f: show(g),
                                g1: show(prev),
                                g2: show(f),
                            });
                        }
                    }
                }
                for m in 0..n {
                    for f in &hom[i][j] {
                        for g in &hom[j][l] {
                            let Some(gf) = compose(g, f, &mut report) else {
                                continue;
                            };
                            for h in &hom[l][m] {
                                report.associativity_checks += 1;
                                let Some(h_gf) = compose(h, &gf, &mut report) else {
                                    continue;
                                };
                                let Some(hg) = compose(h, g, &mut report) else {
                                    continue;
                                };
                                let Some(hg_f) = compose(&hg, f, &mut report) else {
                                    continue;
                                };
                                if h_gf != hg_f {
                                    report.violations.push(LawViolation::Associativity {
                                        objects: [i, j, l, m],
                                        f: show(f),
                                        g: show(g),
                                        h: show(h),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{ChainCategory, GrCategory};
    use crate::ordstruct::Embedding;

    #[test]
    fn gr_and_chain_laws_hold() {
        let r = check_category_laws(&GrCategory::zero(), &[1, 2, 3], 10_000).unwrap();
        assert!(r.holds(), "{:?}", r.violations);
        assert!(r.associativity_checks > 0);
        let r = check_category_laws(&ChainCategory, &[1, 2, 3, 4], 10_000).unwrap();
        assert!(r.holds(), "{:?}", r.violations);
    }

    /// Chains whose composition forgets the last image of the outer map.
    struct Broken;

    impl Category for Broken {
        type Object = usize;
        type Morphism = Embedding;

        fn identity(&self, a: &usize) -> Embedding {
            ChainCategory.identity(a)
        }

        fn compose(&self, g: &Embedding, f: &Embedding) -> Result<Embedding, CategoryError> {
            let good = ChainCategory.compose(g, f)?;
            if f.domain_size() == 1 && g.domain_size() == 2 && g.map() == [1, 3] {
                return Ok(Embedding::new(vec![1], good.codomain_size()).unwrap());
            }
            Ok(good)
        }

        fn hom(&self, a: &usize, b: &usize, cap: usize) -> Result<Vec<Embedding>, CategoryError> {
            ChainCategory.hom(a, b, cap)
        }

        fn encode(&self, f: &Embedding) -> Vec<u8> {
            f.encode()
        }
    }

    #[test]
    fn corrupted_composition_is_located() {
        let r = check_category_laws(&Broken, &[1, 2, 3, 4], 10_000).unwrap();
        assert!(!r.holds());
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, LawViolation::NotMonic { f, .. } if f.contains("[1, 3]"))));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, LawViolation::Associativity { .. })));
    }
}
