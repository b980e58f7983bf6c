//! The lexicographic, anti-lexicographic and complemented lexicographic
//! orders on the power set of a finite chain.

use std::cmp::Ordering;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetOrder {
    /// `A < B` iff `A ⊂ B`, or `min(B∖A) < min(A∖B)` for incomparable sets.
    Lex,
    /// `A < B` iff `A ⊂ B`, or `max(A∖B) < max(B∖A)` for incomparable sets.
    Alex,
    /// `A < B` iff `A ⊃ B`, or `min(A∖B) < min(B∖A)` for incomparable sets.
    CoLex,
}

/// Minimum of `set` in the chain `ground`; the empty set has the top element
/// as its minimum. Second component is true when the convention was used.
fn min_in<T: Ord + Clone>(ground: &[T], set: &BTreeSet<T>) -> (Option<T>, bool) {
    match set.iter().next() {
        Some(x) => (Some(x.clone()), false),
        None => (ground.last().cloned(), true),
    }
}

/// Maximum of `set`; the empty set has the bottom element as its maximum.
fn max_in<T: Ord + Clone>(ground: &[T], set: &BTreeSet<T>) -> (Option<T>, bool) {
    match set.iter().next_back() {
        Some(x) => (Some(x.clone()), false),
        None => (ground.first().cloned(), true),
    }
}

/// Compares two subsets of the chain `ground` (listed in increasing order).
pub fn compare_sets<T: Ord + Clone>(
    ground: &[T],
    a: &BTreeSet<T>,
    b: &BTreeSet<T>,
    order: SetOrder,
) -> Ordering {
    let (ord, fired) = compare_sets_traced(ground, a, b, order);
    debug_assert!(!fired, "empty-set convention reached in a set comparison");
    ord
}

/// [`compare_sets`] that also reports whether an empty-set min/max
/// convention was consulted.
pub fn compare_sets_traced<T: Ord + Clone>(
    ground: &[T],
    a: &BTreeSet<T>,
    b: &BTreeSet<T>,
    order: SetOrder,
) -> (Ordering, bool) {
    if a == b {
        return (Ordering::Equal, false);
    }
    let a_sub_b = a.is_subset(b);
    let b_sub_a = b.is_subset(a);
    let a_minus: BTreeSet<T> = a.difference(b).cloned().collect();
    let b_minus: BTreeSet<T> = b.difference(a).cloned().collect();
    match order {
        SetOrder::Lex | SetOrder::Alex if a_sub_b => (Ordering::Less, false),
        SetOrder::Lex | SetOrder::Alex if b_sub_a => (Ordering::Greater, false),
        SetOrder::CoLex if b_sub_a => (Ordering::Less, false),
        SetOrder::CoLex if a_sub_b => (Ordering::Greater, false),
        SetOrder::Lex => {
            let (x, f1) = min_in(ground, &b_minus);
            let (y, f2) = min_in(ground, &a_minus);
            (less_iff(x < y), f1 || f2)
        }
        SetOrder::Alex => {
            let (x, f1) = max_in(ground, &a_minus);
            let (y, f2) = max_in(ground, &b_minus);
            (less_iff(x < y), f1 || f2)
        }
        SetOrder::CoLex => {
            let (x, f1) = min_in(ground, &a_minus);
            let (y, f2) = min_in(ground, &b_minus);
            (less_iff(x < y), f1 || f2)
        }
    }
}

fn less_iff(less: bool) -> Ordering {
    if less {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[u32]) -> BTreeSet<u32> {
        xs.iter().copied().collect()
    }

    fn power_set(n: u32) -> Vec<BTreeSet<u32>> {
        (0u32..1 << n)
            .map(|mask| (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect())
            .collect()
    }

    const ORDERS: [SetOrder; 3] = [SetOrder::Lex, SetOrder::Alex, SetOrder::CoLex];

    #[test]
    fn worked_examples() {
        let l = [1, 2, 3];
        assert_eq!(
            compare_sets(&l, &set(&[1, 2]), &set(&[3]), SetOrder::Alex),
            Ordering::Less
        );
        assert_eq!(
            compare_sets(&l, &set(&[1, 3]), &set(&[2, 3]), SetOrder::CoLex),
            Ordering::Less
        );
        assert_eq!(
            compare_sets(&l, &set(&[1, 2]), &set(&[1]), SetOrder::CoLex),
            Ordering::Less
        );
        assert_eq!(
            compare_sets(&l, &set(&[2]), &set(&[1, 3]), SetOrder::Lex),
            Ordering::Less
        );
    }

    #[test]
    fn strict_total_orders_on_small_power_sets() {
        for n in 0..=5 {
            let ground: Vec<u32> = (1..=n).collect();
            let sets = power_set(n);
            for order in ORDERS {
                let cmp = |a: &BTreeSet<u32>, b: &BTreeSet<u32>| compare_sets(&ground, a, b, order);
                for a in &sets {
                    assert_eq!(cmp(a, a), Ordering::Equal);
                    for b in &sets {
                        if a != b {
                            // total and antisymmetric
                            assert_ne!(cmp(a, b), Ordering::Equal);
                            assert_eq!(cmp(a, b), cmp(b, a).reverse());
                        }
                    }
                }
                // transitivity of <
                for a in &sets {
                    for b in &sets {
                        if cmp(a, b) != Ordering::Less {
                            continue;
                        }
                        for c in &sets {
                            if cmp(b, c) == Ordering::Less {
                                assert_eq!(cmp(a, c), Ordering::Less, "{order:?}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn colex_is_lex_of_complements() {
        for n in 0..=5 {
            let ground: Vec<u32> = (1..=n).collect();
            let full: BTreeSet<u32> = ground.iter().copied().collect();
            let sets = power_set(n);
            for a in &sets {
                for b in &sets {
                    let ca: BTreeSet<u32> = full.difference(a).copied().collect();
                    let cb: BTreeSet<u32> = full.difference(b).copied().collect();
                    assert_eq!(
                        compare_sets(&ground, a, b, SetOrder::CoLex),
                        compare_sets(&ground, &ca, &cb, SetOrder::Lex)
                    );
                }
            }
        }
    }

    #[test]
    fn empty_set_convention_never_fires() {
        for n in 0..=5 {
            let ground: Vec<u32> = (1..=n).collect();
            let sets = power_set(n);
            for order in ORDERS {
                for a in &sets {
                    for b in &sets {
                        let (_, fired) = compare_sets_traced(&ground, a, b, order);
                        assert!(!fired);
                    }
                }
            }
        }
        // the helpers themselves follow the convention
        let ground = [1u32, 2, 3];
        assert_eq!(min_in(&ground, &BTreeSet::new()), (Some(3), true));
        assert_eq!(max_in(&ground, &BTreeSet::new()), (Some(1), true));
    }

    #[test]
    fn alex_extends_inclusion() {
        let ground: Vec<u32> = (1..=4).collect();
        let sets = power_set(4);
        for a in &sets {
            for b in &sets {
                if a.is_subset(b) && a != b {
                    assert_eq!(compare_sets(&ground, a, b, SetOrder::Alex), Ordering::Less);
                }
            }
        }
    }
}
