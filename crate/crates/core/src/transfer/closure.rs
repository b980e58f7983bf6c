//! Closing binary diagrams of absolutely ordered structures, and the transfer
//! of Ramsey witnesses from a product of single-relation categories to the
//! subcategory of absolutely ordered structures over the whole signature.
//!
//! A compatible cone `(e_i)` into `(C_1, …, C_n)` is turned into a single
//! structure `D` on `C_1 × … × C_n` (lexicographic order, first coordinate
//! most significant) with `(d_1, …, d_r) ∈ R_s^D` iff the `s`-th
//! coordinates form a tuple of `R_s^{C_s}` and the first coordinates are
//! strictly increasing. The legs become `φ_i(b) = (e_i^1(b), …, e_i^n(b))`.

use std::collections::{BTreeSet, HashMap};

use super::{check_colorings, require_witnessed, TransferError, TransferOptions, Verification};
use crate::fincat::{
    copy_system, enumerate_hom, verify_arrow_with, ArrowStats, Category, Product, RelCategory,
};
use crate::ordstruct::{check_embedding, enumerate_embeddings, Embedding, OrderedStructure, Tuple};

/// Two copies `i`, `j` of the top object glued along `u, v: bottom → top`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramArrow {
    pub u: Embedding,
    pub v: Embedding,
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDiagram {
    pub bottom: OrderedStructure,
    pub top: OrderedStructure,
    pub top_count: usize,
    pub arrows: Vec<DiagramArrow>,
}

/// A cone in the product of single-relation categories: `apex[s]` is over
/// the `s`-th symbol alone and `legs[i][s]` embeds the `s`-th component of
/// copy `i` of the top object into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub apex: Vec<OrderedStructure>,
    pub legs: Vec<Vec<Embedding>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub d: OrderedStructure,
    pub legs: Vec<Embedding>,
}

fn validate(diagram: &BinaryDiagram, cone: &Cone) -> Result<(), TransferError> {
    let invalid = |msg: String| Err(TransferError::InvalidDiagram(msg));
    let theta = diagram.top.signature();
    if diagram.bottom.signature() != theta {
        return invalid("bottom and top have different signatures".into());
    }
    if theta.is_empty() {
        return invalid("empty signature".into());
    }
    if !diagram.bottom.is_absolutely_ordered() || !diagram.top.is_absolutely_ordered() {
        return Err(TransferError::NotAbsolutelyOrdered);
    }
    if cone.apex.len() != theta.len() {
        return invalid(format!(
            "{} apex components for {} symbols",
            cone.apex.len(),
            theta.len()
        ));
    }
    for (s, c) in cone.apex.iter().enumerate() {
        if c.signature() != diagram.top.component(s).signature() {
            return invalid(format!(
                "apex component {} is not over `{}` alone",
                s + 1,
                theta.name(s)
            ));
        }
        if !c.is_absolutely_ordered() {
            return Err(TransferError::NotAbsolutelyOrdered);
        }
    }
    if cone.legs.len() != diagram.top_count {
        return invalid(format!(
            "{} legs for {} top copies",
            cone.legs.len(),
            diagram.top_count
        ));
    }
    for (i, leg) in cone.legs.iter().enumerate() {
        if leg.len() != theta.len() {
            return invalid(format!("leg {} has {} components", i + 1, leg.len()));
        }
        for (s, e) in leg.iter().enumerate() {
            if !check_embedding(&diagram.top.component(s), &cone.apex[s], e).holds() {
                return invalid(format!(
                    "component {} of leg {} is not an embedding",
                    s + 1,
                    i + 1
                ));
            }
        }
    }
    for (idx, arrow) in diagram.arrows.iter().enumerate() {
        if arrow.i >= diagram.top_count || arrow.j >= diagram.top_count {
            return invalid(format!("arrow #{idx} points outside the top row"));
        }
        for f in [&arrow.u, &arrow.v] {
            if !check_embedding(&diagram.bottom, &diagram.top, f).holds() {
                return invalid(format!("arrow #{idx} is labelled by a non-embedding"));
            }
        }
        for s in 0..theta.len() {
            let left = cone.legs[arrow.i][s].after(&arrow.u);
            let right = cone.legs[arrow.j][s].after(&arrow.v);
            if left != right {
                return Err(TransferError::IncompatibleCone { arrow: idx });
            }
        }
    }
    Ok(())
}

/// Builds `D` and the legs `φ_i` from a compatible cone, then checks that
/// `D` is absolutely ordered, each `φ_i` embeds the top object and every
/// diagram arrow commutes. `tuple_cap` bounds the size of each `R_s^D`.
pub fn close_binary_diagram_rel(
    diagram: &BinaryDiagram,
    cone: &Cone,
    tuple_cap: usize,
) -> Result<Closure, TransferError> {
    validate(diagram, cone)?;
    let theta = diagram.top.signature();
    let sizes: Vec<usize> = cone.apex.iter().map(OrderedStructure::size).collect();
    let n = sizes.len();
    // all coordinate vectors, in lexicographic order
    let mut points: Vec<Vec<usize>> = vec![Vec::new()];
    for &m in &sizes {
        points = points
            .into_iter()
            .flat_map(|p| {
                (1..=m).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    let index_of = |coords: &[usize]| -> usize {
        coords
            .iter()
            .zip(&sizes)
            .fold(0, |acc, (&x, &m)| acc * m + (x - 1))
            + 1
    };

    let mut relations = Vec::with_capacity(n);
    for s in 0..n {
        let mut rel: BTreeSet<Tuple> = BTreeSet::new();
        for t in &cone.apex[s].relations()[0] {
            // for each place, the points whose s-th coordinate is t[place]
            let choices: Vec<Vec<&Vec<usize>>> = t
                .iter()
                .map(|&x| points.iter().filter(|p| p[s] == x).collect())
                .collect();
            let mut pick = vec![0usize; t.len()];
            'odometer: loop {
                let tuple: Vec<&Vec<usize>> = pick
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| choices[j][c])
                    .collect();
                if tuple.windows(2).all(|w| w[0][0] < w[1][0]) {
                    rel.insert(tuple.iter().map(|p| index_of(p)).collect());
                    if rel.len() > tuple_cap {
                        return Err(TransferError::ClosureFailed(format!(
                            "relation `{}` exceeds {tuple_cap} tuples",
                            theta.name(s)
                        )));
                    }
                }
                let mut j = pick.len();
                loop {
                    if j == 0 {
                        break 'odometer;
                    }
                    j -= 1;
                    pick[j] += 1;
                    if pick[j] < choices[j].len() {
                        break;
                    }
                    pick[j] = 0;
                }
            }
        }
        relations.push(rel);
    }
    let d = OrderedStructure::new(theta.clone(), points.len(), relations)?;
    if !d.is_absolutely_ordered() {
        return Err(TransferError::ClosureFailed(
            "D is not absolutely ordered".into(),
        ));
    }

    let legs = cone
        .legs
        .iter()
        .map(|leg| {
            let map = (1..=diagram.top.size())
                .map(|b| {
                    let coords: Vec<usize> = leg.iter().map(|e| e.apply(b)).collect();
                    index_of(&coords)
                })
                .collect();
            Embedding::new(map, d.size())
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (i, phi) in legs.iter().enumerate() {
        let check = check_embedding(&diagram.top, &d, phi);
        if !check.holds() {
            return Err(TransferError::ClosureFailed(format!(
                "φ_{} fails: {check:?}",
                i + 1
            )));
        }
    }
    for (idx, arrow) in diagram.arrows.iter().enumerate() {
        if legs[arrow.i].after(&arrow.u) != legs[arrow.j].after(&arrow.v) {
            return Err(TransferError::ClosureFailed(format!(
                "arrow #{idx} does not commute"
            )));
        }
    }
    Ok(Closure { d, legs })
}

/// The witness `D` obtained from a product witness, with its decoding.
#[derive(Debug, Clone)]
pub struct SubcategoryTransfer {
    pub d: OrderedStructure,
    /// `f_i: B ↪ D`, one per `e_i ∈ hom(B̄, C̃)`.
    pub legs: Vec<Embedding>,
    pub diagram_arrows: usize,
    pub parent_stats: ArrowStats,
    pub verification: Verification,
    pub colorings_checked: u128,
}

/// From `C̃ → (B̄)^Ā_k` in the product of the single-relation categories,
/// builds the diagram of all coincidences `e_i · ū = e_j · v̄`, closes it to
/// `D` and checks that every `k`-coloring of `hom(A, D)` decodes to a
/// monochromatic `f_i · hom(A, B)`.
pub fn subcategory_transfer(
    a: &OrderedStructure,
    b: &OrderedStructure,
    parent_witness: &[OrderedStructure],
    k: u32,
    opts: &TransferOptions,
) -> Result<SubcategoryTransfer, TransferError> {
    let theta = b.signature();
    if a.signature() != theta {
        return Err(TransferError::NoEmbedding);
    }
    if !a.is_absolutely_ordered() || !b.is_absolutely_ordered() {
        return Err(TransferError::NotAbsolutelyOrdered);
    }
    let limits = &opts.limits;
    let n = theta.len();
    let factors: Vec<RelCategory> = (0..n)
        .map(|s| RelCategory::new(b.component(s).signature().clone()))
        .collect();
    let product = Product::new(factors);
    let a_bar: Vec<OrderedStructure> = (0..n).map(|s| a.component(s)).collect();
    let b_bar: Vec<OrderedStructure> = (0..n).map(|s| b.component(s)).collect();
    let c_tilde = parent_witness.to_vec();

    let parent = copy_system(&product, &a_bar, &b_bar, &c_tilde, limits)?;
    let report = verify_arrow_with(&parent, k, opts.mode, limits)?;
    require_witnessed(&report, "product witness")?;

    let e = enumerate_hom(&product, &b_bar, &c_tilde, limits.hom_cap)?;
    let ab =
        enumerate_embeddings(a, b, limits.hom_cap).map_err(crate::fincat::CategoryError::from)?;
    let mut seen: HashMap<Vec<Embedding>, (usize, usize)> = HashMap::new();
    let mut arrows = Vec::new();
    for (i, ei) in e.iter().enumerate() {
        for (ui, u) in ab.iter().enumerate() {
            let image = product.compose(ei, &vec![u.clone(); n])?;
            match seen.get(&image) {
                Some(&(j, vj)) => arrows.push(DiagramArrow {
                    u: ab[vj].clone(),
                    v: u.clone(),
                    i: j,
                    j: i,
                }),
                None => {
                    seen.insert(image, (i, ui));
                }
            }
        }
    }
    let diagram = BinaryDiagram {
        bottom: a.clone(),
        top: b.clone(),
        top_count: e.len(),
        arrows,
    };
    let cone = Cone {
        apex: c_tilde.clone(),
        legs: e.clone(),
    };
    let closure = close_binary_diagram_rel(&diagram, &cone, limits.hom_cap)?;

    let rel = RelCategory::new(theta.clone());
    let positions = enumerate_hom(&rel, a, &closure.d, limits.hom_cap)?;
    let index: HashMap<&Embedding, usize> =
        positions.iter().enumerate().map(|(i, f)| (f, i)).collect();
    // for each parent position, the positions f_s · u of hom(A, D) it stands for
    let parent_index: HashMap<&Vec<Embedding>, usize> = parent
        .positions()
        .iter()
        .enumerate()
        .map(|(i, f)| (f, i))
        .collect();
    let mut pulled_from: Vec<Option<usize>> = vec![None; parent.positions().len()];
    for (s, es) in e.iter().enumerate() {
        for u in &ab {
            let up = product.compose(es, &vec![u.clone(); n])?;
            let down = closure.legs[s].after(u).expect("legs compose with A ↪ B");
            let p = *parent_index.get(&up).ok_or_else(|| {
                TransferError::DecodingFailed(format!("{up:?} is not in hom(Ā, C̃)"))
            })?;
            let q = *index.get(&down).ok_or_else(|| {
                TransferError::DecodingFailed(format!("{down} is not in hom(A, D)"))
            })?;
            match pulled_from[p] {
                Some(prev) if prev != q => {
                    return Err(TransferError::ClosureFailed(
                        "a coincidence was not glued in D".into(),
                    ))
                }
                _ => pulled_from[p] = Some(q),
            }
        }
    }

    let decode = |colors: &[u32]| -> Result<usize, TransferError> {
        let pulled: Vec<u32> = pulled_from
            .iter()
            .map(|q| q.map_or(1, |q| colors[q]))
            .collect();
        let copy = parent.monochromatic_copy(&pulled).ok_or_else(|| {
            TransferError::DecodingFailed("pulled-back coloring has no monochromatic copy".into())
        })?;
        let w = parent.witness(copy);
        let s = e
            .iter()
            .position(|x| x == w)
            .expect("witness is in hom(B̄, C̃)");
        let mut color = None;
        for u in &ab {
            let g = closure.legs[s].after(u).expect("composable");
            let c = colors[index[&g]];
            if color.is_some_and(|prev| prev != c) {
                return Err(TransferError::DecodingFailed(format!(
                    "f_{} · hom(A, B) is not monochromatic",
                    s + 1
                )));
            }
            color = Some(c);
        }
        Ok(s)
    };
    let (verification, checked) = check_colorings(positions.len(), k, opts, |colors| {
        decode(colors).map(|_| ())
    })?;

    Ok(SubcategoryTransfer {
        d: closure.d,
        legs: closure.legs,
        diagram_arrows: diagram.arrows.len(),
        parent_stats: report.stats,
        verification,
        colorings_checked: checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{verify_arrow, Limits, Mode};
    use crate::ordstruct::Signature;

    fn two_symbols() -> Signature {
        Signature::new([("R1", 2), ("R2", 2)]).unwrap()
    }

    fn structure(sig: &Signature, size: usize, rels: Vec<Vec<Tuple>>) -> OrderedStructure {
        OrderedStructure::new(
            sig.clone(),
            size,
            rels.into_iter().map(|r| r.into_iter().collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_factor_is_the_apex() {
        let sig = Signature::new([("R", 2)]).unwrap();
        let b = structure(&sig, 2, vec![vec![vec![1, 2]]]);
        let c = structure(&sig, 3, vec![vec![vec![1, 3]]]);
        let leg = Embedding::new(vec![1, 3], 3).unwrap();
        let diagram = BinaryDiagram {
            bottom: b.clone(),
            top: b.clone(),
            top_count: 1,
            arrows: vec![],
        };
        let cone = Cone {
            apex: vec![c.clone()],
            legs: vec![vec![leg.clone()]],
        };
        let closure = close_binary_diagram_rel(&diagram, &cone, 1000).unwrap();
        assert_eq!(closure.d, c);
        assert_eq!(closure.legs, vec![leg]);
    }

    #[test]
    fn two_relations_two_legs_sharing_a_point() {
        let sig = two_symbols();
        let b = structure(&sig, 2, vec![vec![vec![1, 2]], vec![]]);
        let point = structure(&sig, 1, vec![vec![], vec![]]);
        let c1 = structure(
            &Signature::new([("R1", 2)]).unwrap(),
            3,
            vec![vec![vec![1, 2], vec![2, 3]]],
        );
        let c2 = structure(&Signature::new([("R2", 2)]).unwrap(), 3, vec![vec![]]);
        // copies {1,2} and {2,3} in both coordinates, sharing the point 2
        let legs = vec![
            vec![
                Embedding::new(vec![1, 2], 3).unwrap(),
                Embedding::new(vec![1, 2], 3).unwrap(),
            ],
            vec![
                Embedding::new(vec![2, 3], 3).unwrap(),
                Embedding::new(vec![2, 3], 3).unwrap(),
            ],
        ];
        let diagram = BinaryDiagram {
            bottom: point,
            top: b.clone(),
            top_count: 2,
            arrows: vec![DiagramArrow {
                u: Embedding::new(vec![2], 2).unwrap(),
                v: Embedding::new(vec![1], 2).unwrap(),
                i: 0,
                j: 1,
            }],
        };
        let cone = Cone {
            apex: vec![c1, c2],
            legs,
        };
        let closure = close_binary_diagram_rel(&diagram, &cone, 1000).unwrap();
        assert_eq!(closure.d.size(), 9);
        assert!(closure.d.is_absolutely_ordered());
        // (1,1) → 1, (2,2) → 5, (3,3) → 9
        assert_eq!(closure.legs[0].map(), &[1, 5]);
        assert_eq!(closure.legs[1].map(), &[5, 9]);
        for phi in &closure.legs {
            assert!(check_embedding(&b, &closure.d, phi).holds());
        }
    }

    #[test]
    fn incompatible_cone_is_rejected() {
        let sig = Signature::new([("R", 2)]).unwrap();
        let b = structure(&sig, 2, vec![vec![]]);
        let point = structure(&sig, 1, vec![vec![]]);
        let c = structure(&sig, 3, vec![vec![]]);
        let diagram = BinaryDiagram {
            bottom: point,
            top: b,
            top_count: 2,
            arrows: vec![DiagramArrow {
                u: Embedding::new(vec![1], 2).unwrap(),
                v: Embedding::new(vec![1], 2).unwrap(),
                i: 0,
                j: 1,
            }],
        };
        let cone = Cone {
            apex: vec![c],
            legs: vec![
                vec![Embedding::new(vec![1, 2], 3).unwrap()],
                vec![Embedding::new(vec![2, 3], 3).unwrap()],
            ],
        };
        assert_eq!(
            close_binary_diagram_rel(&diagram, &cone, 1000),
            Err(TransferError::IncompatibleCone { arrow: 0 })
        );
    }

    #[test]
    fn transfer_of_point_to_edge_pigeonhole() {
        // empty relation: the product witness is the 3-chain
        let sig = Signature::new([("R", 2)]).unwrap();
        let a = structure(&sig, 1, vec![vec![]]);
        let b = structure(&sig, 2, vec![vec![]]);
        let c = structure(&sig, 3, vec![vec![]]);
        let t = subcategory_transfer(
            &a,
            &b,
            std::slice::from_ref(&c),
            2,
            &TransferOptions::default(),
        )
        .unwrap();
        assert_eq!(t.d, c);
        assert_eq!(t.legs.len(), 3);
        assert_eq!(t.verification, Verification::Exhaustive);
        let direct = verify_arrow(
            &RelCategory::new(sig),
            &a,
            &b,
            &t.d,
            2,
            Mode::Exhaustive,
            &Limits::default(),
        )
        .unwrap();
        assert!(direct.is_witnessed());
    }

    #[test]
    fn transfer_over_two_relations() {
        let sig = two_symbols();
        let a = structure(&sig, 1, vec![vec![], vec![]]);
        let b = structure(&sig, 2, vec![vec![vec![1, 2]], vec![]]);
        let c1 = structure(
            &Signature::new([("R1", 2)]).unwrap(),
            3,
            vec![vec![vec![1, 2], vec![1, 3], vec![2, 3]]],
        );
        let empty = |size| structure(&Signature::new([("R2", 2)]).unwrap(), size, vec![vec![]]);
        // the second factor needs 2^3 colors, so 2 points are not enough
        let err = subcategory_transfer(
            &a,
            &b,
            &[c1.clone(), empty(2)],
            2,
            &TransferOptions::default(),
        );
        assert!(matches!(
            err,
            Err(TransferError::ComponentArrowUnverified(_))
        ));
        let t =
            subcategory_transfer(&a, &b, &[c1, empty(9)], 2, &TransferOptions::default()).unwrap();
        assert!(t.d.is_absolutely_ordered());
        assert_eq!(t.d.size(), 27);
        assert_eq!(t.legs.len(), 3 * 36);
        for f in &t.legs {
            assert!(check_embedding(&b, &t.d, f).holds());
        }
    }
}
