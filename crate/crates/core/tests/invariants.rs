use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use serde_json::json;

use ramsey_core::cert::{self, CheckOutcome, RunConfig, Stage};
use ramsey_core::fincat::{
    find_monochromatic, verify_arrow, ChainCategory, GrCategory, Limits, Mode, Verdict,
};
use ramsey_core::ordstruct::json::{parse_structure, structure_to_value, to_value};
use ramsey_core::ordstruct::{
    check_embedding, enumerate_embeddings, AnyStructure, OrderedStructure, Signature,
};
use ramsey_core::paramwords::{enumerate_words, Alphabet, ParamWord};
use ramsey_core::transfer::{dagger, mat, star, tp, tup};

fn binary_alphabet() -> Arc<Alphabet> {
    Arc::new(Alphabet::new(["0", "1"]).unwrap())
}

/// A word of `W^n_m` picked by index from the canonical enumeration.
fn word(alphabet: &Arc<Alphabet>, n: usize, m: usize, pick: usize) -> ParamWord {
    let all = enumerate_words(alphabet, n, m, 1 << 16).unwrap();
    all[pick % all.len()].clone()
}

fn structure() -> impl Strategy<Value = OrderedStructure> {
    (1usize..=4).prop_flat_map(|size| {
        let tuples = |arity: usize| {
            proptest::collection::btree_set(proptest::collection::vec(1..=size, arity), 0..6)
        };
        (tuples(3), tuples(1), tuples(2)).prop_map(move |(r, s, t)| {
            let sig = Signature::new([("R", 3), ("S", 1), ("T", 2)]).unwrap();
            OrderedStructure::new(sig, size, vec![r, s, t]).unwrap()
        })
    })
}

fn graph() -> impl Strategy<Value = OrderedStructure> {
    (1usize..=5).prop_flat_map(|size| {
        proptest::collection::btree_set(proptest::collection::vec(1..=size, 2), 0..8).prop_map(
            move |edges| {
                let sig = Signature::new([("E", 2)]).unwrap();
                OrderedStructure::new(sig, size, vec![edges]).unwrap()
            },
        )
    })
}

proptest! {
    #[test]
    fn substitution_is_associative(
        (n, m, l, p) in (1usize..=5).prop_flat_map(|n| (Just(n), 1..=n))
            .prop_flat_map(|(n, m)| (Just(n), Just(m), 1..=m))
            .prop_flat_map(|(n, m, l)| (Just(n), Just(m), Just(l), 1..=l)),
        picks in any::<(usize, usize, usize)>(),
    ) {
        let alphabet = binary_alphabet();
        let u = word(&alphabet, n, m, picks.0);
        let v = word(&alphabet, m, l, picks.1);
        let w = word(&alphabet, l, p, picks.2);
        let left = u.substitute(&v).unwrap().substitute(&w).unwrap();
        let right = u.substitute(&v.substitute(&w).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(left.len(), n);
        prop_assert_eq!(left.params(), p);
        let reparsed = ParamWord::parse(Arc::clone(&alphabet), &left.to_string()).unwrap();
        prop_assert_eq!(reparsed, left);
    }

    #[test]
    fn identity_word_is_neutral(n in 1usize..=5, m_seed in any::<usize>(), pick in any::<usize>()) {
        let gr = GrCategory::zero();
        let m = m_seed % n + 1;
        let u = word(gr.alphabet(), n, m, pick);
        let id_m = ParamWord::identity(Arc::clone(gr.alphabet()), m);
        let id_n = ParamWord::identity(Arc::clone(gr.alphabet()), n);
        prop_assert_eq!(u.substitute(&id_m).unwrap(), u.clone());
        prop_assert_eq!(id_n.substitute(&u).unwrap(), u);
    }

    #[test]
    fn structures_round_trip_canonically(s in structure()) {
        let v = structure_to_value(&s);
        let parsed = parse_structure(&v).unwrap();
        prop_assert_eq!(&parsed, &AnyStructure::Rel(s));
        prop_assert_eq!(to_value(&parsed), v);
    }

    #[test]
    fn dagger_then_star_is_identity(s in structure()) {
        let d = dagger(&s);
        prop_assert!(d.is_absolutely_ordered());
        prop_assert_eq!(star(&d).unwrap(), s);
    }

    #[test]
    fn tuple_type_and_matrix_rebuild(a in proptest::collection::vec(1usize..=6, 1..=6)) {
        let sigma = tp(&a);
        let b = mat(&a);
        prop_assert!(b.windows(2).all(|p| p[0] < p[1]));
        prop_assert_eq!(sigma.classes(), b.len());
        let t = tup(&sigma, &b).unwrap();
        prop_assert_eq!(&t, &a);
        prop_assert_eq!(tp(&t), sigma);
    }

    #[test]
    fn enumerated_embeddings_are_embeddings(a in graph(), b in graph()) {
        let found = enumerate_embeddings(&a, &b, 1 << 16).unwrap();
        let distinct: BTreeSet<_> = found.iter().map(|f| f.map().to_vec()).collect();
        prop_assert_eq!(distinct.len(), found.len());
        for f in &found {
            prop_assert!(check_embedding(&a, &b, f).holds());
            prop_assert!(f.is_strictly_increasing());
        }
    }

    #[test]
    fn verifier_modes_agree_on_chains(a in 1usize..=3, db in 0usize..=2, dc in 0usize..=3, k in 2u32..=3) {
        let (b, c) = (a + db, a + db + dc);
        let limits = Limits::default();
        let ex = verify_arrow(&ChainCategory, &a, &b, &c, k, Mode::Exhaustive, &limits);
        let bt = verify_arrow(&ChainCategory, &a, &b, &c, k, Mode::Backtrack, &limits).unwrap();
        if let Ok(ex) = ex {
            if ex.verdict != Verdict::BudgetExceeded {
                prop_assert_eq!(&ex.verdict, &bt.verdict);
            }
        }
        if let Verdict::Refuted(coloring) = &bt.verdict {
            prop_assert!(coloring.colors.iter().all(|&x| (1..=k).contains(&x)));
            let copy = find_monochromatic(&ChainCategory, &a, &b, &c, coloring, 1 << 16).unwrap();
            prop_assert!(copy.is_none());
        }
    }

    #[test]
    fn dagger_certificates_replay(s in structure(), seed in 0u64..1000) {
        let config = RunConfig { seed, ..RunConfig::default() };
        let input = json!({"a": structure_to_value(&s)});
        let first = cert::build(Stage::Dagger, &input, &config).unwrap();
        let second = cert::build(Stage::Dagger, &input, &config).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(cert::check(&first).unwrap(), CheckOutcome::Replayed);
    }
}
