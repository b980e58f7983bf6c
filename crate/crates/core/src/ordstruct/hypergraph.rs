use std::cmp::Ordering;
use std::collections::BTreeSet;

use super::setorder::{compare_sets, SetOrder};
use super::{Hypergraph, StructureError};

/// Singletons and all vertex sets of size at least 2 lying inside an edge,
/// sorted by the anti-lexicographic order.
pub fn downsets(h: &Hypergraph) -> Vec<Vec<usize>> {
    let mut found: BTreeSet<Vec<usize>> = (1..=h.size()).map(|v| vec![v]).collect();
    for edge in h.edges() {
        let b = edge.len();
        for mask in 1u32..1 << b {
            if mask.count_ones() >= 2 {
                let subset: Vec<usize> = (0..b)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| edge[i])
                    .collect();
                found.insert(subset);
            }
        }
    }
    let ground: Vec<usize> = (1..=h.size()).collect();
    let mut sets: Vec<BTreeSet<usize>> =
        found.into_iter().map(|d| d.into_iter().collect()).collect();
    sets.sort_by(|a, b| compare_sets(&ground, a, b, SetOrder::Alex));
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// The hypergraph on all subsets of `{1..n}`, ordered by the complemented
/// lexicographic order, whose edges are the `b`-sets with a common element.
#[derive(Debug, Clone)]
pub struct TargetHypergraph {
    n: usize,
    hypergraph: Hypergraph,
    /// Subset (bit i = element i+1) of each vertex, indexed by vertex - 1.
    subsets: Vec<u64>,
    /// Vertex number of each subset mask.
    vertex_of: Vec<usize>,
}

impl TargetHypergraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.hypergraph
    }

    pub fn uniformity(&self) -> usize {
        self.hypergraph.uniformity()
    }

    /// Vertex (1-based rank) of a subset mask.
    pub fn vertex_of(&self, mask: u64) -> usize {
        self.vertex_of[mask as usize]
    }

    /// Subset mask of a vertex.
    pub fn subset_of(&self, vertex: usize) -> u64 {
        self.subsets[vertex - 1]
    }

    /// Vertex as a sorted list of elements of `{1..n}`.
    pub fn subset_elements(&self, vertex: usize) -> Vec<usize> {
        let mask = self.subset_of(vertex);
        (1..=self.n).filter(|i| mask >> (i - 1) & 1 == 1).collect()
    }
}

/// Builds the target hypergraph for `n`; fails when `2^n` vertices or the
/// edge count exceed `cap`.
pub fn gr_target_hypergraph(
    n: usize,
    b: usize,
    cap: usize,
) -> Result<TargetHypergraph, StructureError> {
    if b < 2 {
        return Err(StructureError::UniformityTooSmall(b));
    }
    if n >= 40 || (1u128 << n) > cap as u128 {
        return Err(StructureError::SizeLimitExceeded {
            count: 1u128 << n.min(127),
            cap,
        });
    }
    let ground: Vec<usize> = (1..=n).collect();
    let as_set =
        |mask: u64| -> BTreeSet<usize> { (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect() };
    let mut subsets: Vec<u64> = (0..1u64 << n).collect();
    subsets.sort_by(|&x, &y| {
        if x == y {
            Ordering::Equal
        } else {
            compare_sets(&ground, &as_set(x), &as_set(y), SetOrder::CoLex)
        }
    });
    let mut vertex_of = vec![0usize; subsets.len()];
    for (i, &mask) in subsets.iter().enumerate() {
        vertex_of[mask as usize] = i + 1;
    }
    let mut edges = Vec::new();
    let mut current = Vec::with_capacity(b);
    collect_edges(&subsets, b, 0, u64::MAX, &mut current, &mut edges, cap)?;
    let hypergraph = Hypergraph::new(b, subsets.len(), edges)?;
    Ok(TargetHypergraph {
        n,
        hypergraph,
        subsets,
        vertex_of,
    })
}

fn collect_edges(
    subsets: &[u64],
    b: usize,
    start: usize,
    common: u64,
    current: &mut Vec<usize>,
    edges: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<(), StructureError> {
    if current.len() == b {
        if edges.len() >= cap {
            return Err(StructureError::SizeLimitExceeded {
                count: cap as u128 + 1,
                cap,
            });
        }
        edges.push(current.clone());
        return Ok(());
    }
    for idx in start..subsets.len() {
        let next = common & subsets[idx];
        if next == 0 {
            continue;
        }
        current.push(idx + 1);
        collect_edges(subsets, b, idx + 1, next, current, edges, cap)?;
        current.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn downset_examples() {
        let k2 = Hypergraph::new(2, 2, [vec![1, 2]]).unwrap();
        assert_eq!(downsets(&k2), vec![vec![1], vec![2], vec![1, 2]]);
        let path = Hypergraph::new(2, 3, [vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(
            downsets(&path),
            vec![vec![1], vec![2], vec![1, 2], vec![3], vec![2, 3]]
        );
        let empty = Hypergraph::edgeless(2, 4).unwrap();
        assert_eq!(downsets(&empty), vec![vec![1], vec![2], vec![3], vec![4]]);
        let tri = Hypergraph::new(3, 3, [vec![1, 2, 3]]).unwrap();
        assert_eq!(
            downsets(&tri),
            vec![
                vec![1],
                vec![2],
                vec![1, 2],
                vec![3],
                vec![1, 3],
                vec![2, 3],
                vec![1, 2, 3]
            ]
        );
    }

    #[test]
    fn target_small_cases() {
        let g1 = gr_target_hypergraph(1, 2, 1 << 10).unwrap();
        assert_eq!(g1.hypergraph().size(), 2);
        assert!(g1.hypergraph().edges().is_empty());
        // colex order on P({1,2}): {1,2}, {1}, {2}, ∅
        let g2 = gr_target_hypergraph(2, 2, 1 << 10).unwrap();
        let order: Vec<Vec<usize>> = (1..=4).map(|v| g2.subset_elements(v)).collect();
        assert_eq!(order, vec![vec![1, 2], vec![1], vec![2], vec![]]);
        let edges: Vec<&Vec<usize>> = g2.hypergraph().edges().iter().collect();
        assert_eq!(edges, [&vec![1, 2], &vec![1, 3]]);
    }

    #[test]
    fn colex_rank_has_closed_form() {
        // the colex rank reverses the bit-reversed integer order
        for n in 1..=6 {
            let g = gr_target_hypergraph(n, 2, 1 << 12).unwrap();
            for mask in 0u64..1 << n {
                let rev = (0..n).fold(0u64, |acc, i| acc << 1 | (mask >> i & 1));
                let expected = ((1u64 << n) - rev) as usize;
                assert_eq!(g.vertex_of(mask), expected, "n={n} mask={mask:b}");
            }
        }
    }

    #[test]
    fn empty_set_is_isolated() {
        for n in 1..=5 {
            for b in 2..=3 {
                let g = gr_target_hypergraph(n, b, 1 << 16).unwrap();
                let empty = g.vertex_of(0);
                assert!(g.hypergraph().edges().iter().all(|e| !e.contains(&empty)));
            }
        }
    }

    #[test]
    fn edges_match_definition() {
        let n = 4;
        let g = gr_target_hypergraph(n, 2, 1 << 12).unwrap();
        let verts = 1usize << n;
        let mut count = 0;
        for x in 1..=verts {
            for y in x + 1..=verts {
                let meet = g.subset_of(x) & g.subset_of(y) != 0;
                assert_eq!(g.hypergraph().has_edge(&[x, y]), meet);
                count += usize::from(meet);
            }
        }
        assert_eq!(count, g.hypergraph().edges().len());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(gr_target_hypergraph(12, 2, 1000).is_err());
        assert!(gr_target_hypergraph(2, 1, 1000).is_err());
    }
}
