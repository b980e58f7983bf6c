//! Total quasiorders on `{1..r}` and the type / matrix / reconstruction
//! maps between arbitrary tuples and strictly increasing ones.

use std::collections::BTreeSet;
use std::fmt;

use super::TransferError;

/// A total quasiorder on `{1..r}`, stored as the class rank of each index:
/// `(i, j)` is in the relation iff `rank(i) <= rank(j)`. Ranks are dense,
/// so they run over `1..=classes()`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TotalQuasiorder {
    ranks: Vec<usize>,
}

impl TotalQuasiorder {
    /// From a rank vector; ranks must cover `1..=max` without gaps.
    pub fn from_ranks(ranks: Vec<usize>) -> Result<Self, TransferError> {
        if ranks.is_empty() {
            return Err(TransferError::InvalidQuasiorder("empty index set".into()));
        }
        let used: BTreeSet<usize> = ranks.iter().copied().collect();
        let max = *used.iter().next_back().expect("nonempty");
        if used.len() != max || used.iter().next() != Some(&1) {
            return Err(TransferError::InvalidQuasiorder(format!(
                "ranks {ranks:?} are not dense"
            )));
        }
        Ok(Self { ranks })
    }

    /// From the relation itself, given as pairs over `{1..r}`; checks
    /// reflexivity, transitivity and totality.
    pub fn from_pairs(r: usize, pairs: &BTreeSet<(usize, usize)>) -> Result<Self, TransferError> {
        if r == 0 {
            return Err(TransferError::InvalidQuasiorder("empty index set".into()));
        }
        let bad = |msg: String| Err(TransferError::InvalidQuasiorder(msg));
        if let Some(&(i, j)) = pairs
            .iter()
            .find(|&&(i, j)| i == 0 || j == 0 || i > r || j > r)
        {
            return bad(format!("pair ({i}, {j}) outside 1..{r}"));
        }
        let le = |i: usize, j: usize| pairs.contains(&(i, j));
        for i in 1..=r {
            if !le(i, i) {
                return bad(format!("not reflexive at {i}"));
            }
            for j in 1..=r {
                if !le(i, j) && !le(j, i) {
                    return bad(format!("{i} and {j} are incomparable"));
                }
                for l in 1..=r {
                    if le(i, j) && le(j, l) && !le(i, l) {
                        return bad(format!("not transitive on {i}, {j}, {l}"));
                    }
                }
            }
        }
        // rank = number of distinct classes strictly below, plus one
        let ranks = (1..=r)
            .map(|i| {
                let below: BTreeSet<Vec<usize>> = (1..=r)
                    .filter(|&j| le(j, i) && !le(i, j))
                    .map(|j| (1..=r).filter(|&l| le(j, l) && le(l, j)).collect())
                    .collect();
                below.len() + 1
            })
            .collect();
        Self::from_ranks(ranks)
    }

    /// The linear order `1 < 2 < … < r`.
    pub fn linear(r: usize) -> Self {
        Self {
            ranks: (1..=r).collect(),
        }
    }

    /// Every total quasiorder on `{1..r}`, ordered by rank vector.
    pub fn all(r: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut ranks = vec![1usize; r];
        loop {
            if let Ok(q) = Self::from_ranks(ranks.clone()) {
                out.push(q);
            }
            let mut i = r;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if ranks[i] < r {
                    ranks[i] += 1;
                    break;
                }
                ranks[i] = 1;
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Number of equivalence classes.
    pub fn classes(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.ranks[i - 1] <= self.ranks[j - 1]
    }

    pub fn equivalent(&self, i: usize, j: usize) -> bool {
        self.ranks[i - 1] == self.ranks[j - 1]
    }

    pub fn pairs(&self) -> BTreeSet<(usize, usize)> {
        let r = self.arity();
        (1..=r)
            .flat_map(|i| (1..=r).map(move |j| (i, j)))
            .filter(|&(i, j)| self.le(i, j))
            .collect()
    }

    /// The classes in increasing order, each a sorted index list.
    pub fn class_list(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.classes()];
        for (i, &rank) in self.ranks.iter().enumerate() {
            out[rank - 1].push(i + 1);
        }
        out
    }

    /// Least index of each class, classes in increasing order.
    pub fn representatives(&self) -> Vec<usize> {
        self.class_list().iter().map(|c| c[0]).collect()
    }

    pub fn is_linear(&self) -> bool {
        self.classes() == self.arity()
    }
}

impl fmt::Display for TotalQuasiorder {
    /// Rank vector joined by commas, e.g. `2,1,2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ranks.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// The type of a tuple: `(i, j)` related iff `a_i <= a_j`.
pub fn tp<T: Ord>(a: &[T]) -> TotalQuasiorder {
    let distinct: BTreeSet<&T> = a.iter().collect();
    let ranks = a
        .iter()
        .map(|x| distinct.iter().position(|y| *y == x).expect("present") + 1)
        .collect();
    TotalQuasiorder { ranks }
}

/// The matrix of a tuple: one entry per class of its type, in increasing
/// order.
pub fn mat<T: Ord + Clone>(a: &[T]) -> Vec<T> {
    let sigma = tp(a);
    sigma
        .representatives()
        .into_iter()
        .map(|i| a[i - 1].clone())
        .collect()
}

/// Rebuilds the tuple with type `sigma` and matrix `b`.
pub fn tup<T: Ord + Clone>(sigma: &TotalQuasiorder, b: &[T]) -> Result<Vec<T>, TransferError> {
    if sigma.classes() != b.len() {
        return Err(TransferError::ClassCountMismatch {
            classes: sigma.classes(),
            len: b.len(),
        });
    }
    if b.windows(2).any(|p| p[0] >= p[1]) {
        return Err(TransferError::NotStrictlyIncreasing);
    }
    Ok(sigma.ranks.iter().map(|&r| b[r - 1].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        let a = [5, 3, 5];
        let s = tp(&a);
        assert_eq!(s.class_list(), vec![vec![2], vec![1, 3]]);
        assert_eq!(mat(&a), vec![3, 5]);
        assert_eq!(tup(&s, &[3, 5]).unwrap(), vec![5, 3, 5]);
        assert_eq!(tp(&[1, 2, 3]), TotalQuasiorder::linear(3));
        assert_eq!(mat(&[1, 2, 3]), vec![1, 2, 3]);
        assert_eq!(mat(&[7, 7]), vec![7]);
        assert_eq!(tp(&[4, 4, 4]).classes(), 1);
        assert_eq!(
            tup(&TotalQuasiorder::linear(2), &[2, 9]).unwrap(),
            vec![2, 9]
        );
    }

    #[test]
    fn tup_rejects_bad_input() {
        let s = tp(&[5, 3, 5]);
        assert_eq!(
            tup(&s, &[1, 2, 3]),
            Err(TransferError::ClassCountMismatch { classes: 2, len: 3 })
        );
        assert_eq!(tup(&s, &[4, 4]), Err(TransferError::NotStrictlyIncreasing));
    }

    #[test]
    fn pairs_round_trip_and_validation() {
        for r in 1..=4 {
            for q in TotalQuasiorder::all(r) {
                assert_eq!(TotalQuasiorder::from_pairs(r, &q.pairs()).unwrap(), q);
            }
        }
        let mut p: BTreeSet<(usize, usize)> = [(1, 1), (2, 2)].into();
        assert!(TotalQuasiorder::from_pairs(2, &p).is_err());
        p.insert((1, 2));
        assert!(TotalQuasiorder::from_pairs(2, &p).is_ok());
        assert!(TotalQuasiorder::from_ranks(vec![1, 3]).is_err());
    }

    #[test]
    fn counts_are_ordered_bell_numbers() {
        let counts: Vec<usize> = (1..=4).map(|r| TotalQuasiorder::all(r).len()).collect();
        assert_eq!(counts, vec![1, 3, 13, 75]);
    }
}
