//! Deciding `C → (B)^A_k`.
//!
//! The question only depends on the family of "copies": for each
//! `w ∈ hom(B, C)` the set of positions of `w · hom(A, B)` inside the
//! canonically ordered `hom(A, C)`. A coloring is bad when no copy is
//! monochromatic. Both search modes return the lexicographically least bad
//! coloring, so they agree on every instance they both finish.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;

use super::{enumerate_hom, Category, CategoryError, Limits, MAX_COLORS, MIN_COLORS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exhaustive,
    Backtrack,
}

/// A coloring of `hom(A, C)`, positionally aligned with its canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring<M> {
    pub domain: Vec<M>,
    pub colors: Vec<u32>,
}

impl<M: Eq + std::hash::Hash> Coloring<M> {
    pub fn color_of(&self, f: &M) -> Option<u32> {
        self.domain
            .iter()
            .position(|g| g == f)
            .map(|i| self.colors[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<M> {
    /// Every coloring has a monochromatic copy; use [`find_monochromatic`] or
    /// [`CopySystem::monochromatic`] to exhibit it for a given coloring.
    Witnessed,
    Refuted(Coloring<M>),
    /// The node budget ran out before the search finished.
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ArrowStats {
    pub nodes: u64,
    pub colorings: u128,
    /// `|hom(A, C)|`
    pub positions: usize,
    /// Distinct copies `w · hom(A, B)`.
    pub copies: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowReport<M> {
    pub verdict: Verdict<M>,
    pub stats: ArrowStats,
    pub mode: Mode,
    /// False when a parallel search produced the verdict; the returned bad
    /// coloring may then differ between runs.
    pub deterministic: bool,
}

impl<M> ArrowReport<M> {
    pub fn is_witnessed(&self) -> bool {
        matches!(self.verdict, Verdict::Witnessed)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self.verdict, Verdict::Refuted(_))
    }
}

/// `hom(A, C)` together with the position sets of all copies of `B`.
#[derive(Debug, Clone)]
pub struct CopySystem<M> {
    positions: Vec<M>,
    copies: Vec<Vec<u32>>,
    /// One `w ∈ hom(B, C)` producing each copy.
    witnesses: Vec<M>,
}

pub fn copy_system<C: Category>(
    cat: &C,
    a: &C::Object,
    b: &C::Object,
    c: &C::Object,
    limits: &Limits,
) -> Result<CopySystem<C::Morphism>, CategoryError> {
    let ab = enumerate_hom(cat, a, b, limits.hom_cap)?;
    if ab.is_empty() {
        return Err(CategoryError::EmptyHom);
    }
    let ac = enumerate_hom(cat, a, c, limits.hom_cap)?;
    let bc = enumerate_hom(cat, b, c, limits.hom_cap)?;
    let index: HashMap<&C::Morphism, u32> =
        ac.iter().enumerate().map(|(i, f)| (f, i as u32)).collect();
    let mut seen = HashSet::new();
    let mut copies = Vec::new();
    let mut witnesses = Vec::new();
    for w in &bc {
        let mut set = Vec::with_capacity(ab.len());
        for f in &ab {
            let g = cat.compose(w, f)?;
            let i = index.get(&g).copied().ok_or_else(|| {
                CategoryError::DomainMismatch(format!("{g:?} is missing from hom(A, C)"))
            })?;
            set.push(i);
        }
        set.sort_unstable();
        set.dedup();
        if seen.insert(set.clone()) {
            copies.push(set);
            witnesses.push(w.clone());
        }
    }
    Ok(CopySystem {
        positions: ac,
        copies,
        witnesses,
    })
}

impl<M: Clone> CopySystem<M> {
    pub fn positions(&self) -> &[M] {
        &self.positions
    }

    pub fn copies(&self) -> &[Vec<u32>] {
        &self.copies
    }

    /// A morphism of `hom(B, C)` producing copy `i`.
    pub fn witness(&self, i: usize) -> &M {
        &self.witnesses[i]
    }

    /// Index of the first copy (in `hom(B, C)` order) that is monochromatic
    /// under `colors`.
    pub fn monochromatic_copy(&self, colors: &[u32]) -> Option<usize> {
        self.copies.iter().position(|copy| is_mono(copy, colors))
    }

    /// First monochromatic copy as a morphism producing it, with its color.
    pub fn monochromatic(&self, colors: &[u32]) -> Option<(M, u32)> {
        self.monochromatic_copy(colors).map(|i| {
            (
                self.witnesses[i].clone(),
                colors[self.copies[i][0] as usize],
            )
        })
    }

    fn coloring(&self, colors: Vec<u32>) -> Coloring<M> {
        Coloring {
            domain: self.positions.clone(),
            colors,
        }
    }
}

fn is_mono(copy: &[u32], colors: &[u32]) -> bool {
    let first = colors[copy[0] as usize];
    copy.iter().all(|&q| colors[q as usize] == first)
}

pub fn verify_arrow<C: Category>(
    cat: &C,
    a: &C::Object,
    b: &C::Object,
    c: &C::Object,
    k: u32,
    mode: Mode,
    limits: &Limits,
) -> Result<ArrowReport<C::Morphism>, CategoryError> {
    check_colors(k)?;
    let system = copy_system(cat, a, b, c, limits)?;
    verify_arrow_with(&system, k, mode, limits)
}

fn check_colors(k: u32) -> Result<(), CategoryError> {
    if (MIN_COLORS..=MAX_COLORS).contains(&k) {
        Ok(())
    } else {
        Err(CategoryError::BadColorCount(k))
    }
}

/// Runs the decision on a prebuilt copy system.
pub fn verify_arrow_with<M: Clone>(
    system: &CopySystem<M>,
    k: u32,
    mode: Mode,
    limits: &Limits,
) -> Result<ArrowReport<M>, CategoryError> {
    check_colors(k)?;
    let n = system.positions.len();
    let mut stats = ArrowStats {
        positions: n,
        copies: system.copies.len(),
        ..ArrowStats::default()
    };
    if mode == Mode::Exhaustive {
        let count = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if n > limits.exhaustive_positions || count > limits.coloring_cap {
            return Err(CategoryError::SizeLimitExceeded {
                count,
                cap: limits.coloring_cap,
            });
        }
    }
    // a copy with a single position is monochromatic under every coloring
    if system.copies.iter().any(|c| c.len() == 1) {
        return Ok(ArrowReport {
            verdict: Verdict::Witnessed,
            stats,
            mode,
            deterministic: true,
        });
    }
    let mut deterministic = true;
    let verdict = match mode {
        Mode::Exhaustive => {
            let (bad, examined) = exhaustive(&system.copies, n, k);
            stats.colorings = examined;
            match bad {
                Some(colors) => Verdict::Refuted(system.coloring(colors)),
                None => Verdict::Witnessed,
            }
        }
        Mode::Backtrack => {
            let (outcome, nodes) = if limits.jobs > 1 {
                deterministic = false;
                backtrack_parallel(&system.copies, n, k, limits.node_cap, limits.jobs)
            } else {
                backtrack(&system.copies, n, k, limits.node_cap)
            };
            stats.nodes = nodes;
            match outcome {
                Outcome::Found(colors) => Verdict::Refuted(system.coloring(colors)),
                Outcome::Exhausted => Verdict::Witnessed,
                Outcome::Budget => Verdict::BudgetExceeded,
            }
        }
    };
    Ok(ArrowReport {
        verdict,
        stats,
        mode,
        deterministic,
    })
}

fn exhaustive(copies: &[Vec<u32>], n: usize, k: u32) -> (Option<Vec<u32>>, u128) {
    let mut colors = vec![1u32; n];
    let mut examined: u128 = 0;
    loop {
        examined += 1;
        if !copies.iter().any(|c| is_mono(c, &colors)) {
            return (Some(colors), examined);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return (None, examined);
            }
            i -= 1;
            if colors[i] < k {
                colors[i] += 1;
                break;
            }
            colors[i] = 1;
        }
    }
}

enum Outcome {
    Found(Vec<u32>),
    Exhausted,
    Budget,
}

enum Step {
    Found,
    Exhausted,
    Budget,
    Cancelled,
}

const FLUSH_EVERY: u64 = 4096;

/// Node counter shared between workers, flushed in batches.
struct Budget<'a> {
    shared: &'a AtomicU64,
    local: u64,
    cap: u64,
}

impl Budget<'_> {
    fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local.is_multiple_of(FLUSH_EVERY) {
            self.shared.fetch_add(FLUSH_EVERY, Ordering::Relaxed);
            self.local = 0;
        }
        self.shared.load(Ordering::Relaxed) + self.local <= self.cap
    }

    fn flush(&mut self) {
        self.shared.fetch_add(self.local, Ordering::Relaxed);
        self.local = 0;
    }
}

/// Assigns colors position by position in increasing order. A copy whose
/// positions except the last all share color `c` forbids `c` at that last
/// position; a position with every color forbidden ends the branch. Colors
/// are tried in increasing order and never exceed the largest used color
/// plus one, which keeps the first bad coloring found the lex-least one.
struct Solver<'a> {
    k: u32,
    copies: &'a [Vec<u32>],
    by_penultimate: &'a [Vec<u32>],
    colors: Vec<u32>,
    prefix_max: Vec<u32>,
    forbid: Vec<u32>,
    blocked: Vec<u32>,
    trail: Vec<Vec<(u32, u32)>>,
    next: Vec<u32>,
}

fn index_by_penultimate(copies: &[Vec<u32>], n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new(); n];
    for (i, copy) in copies.iter().enumerate() {
        out[copy[copy.len() - 2] as usize].push(i as u32);
    }
    out
}

impl<'a> Solver<'a> {
    fn new(copies: &'a [Vec<u32>], by_penultimate: &'a [Vec<u32>], n: usize, k: u32) -> Self {
        Self {
            k,
            copies,
            by_penultimate,
            colors: vec![0; n],
            prefix_max: vec![0; n + 1],
            forbid: vec![0; n * (k as usize + 1)],
            blocked: vec![0; n],
            trail: vec![Vec::new(); n],
            next: vec![1; n],
        }
    }

    fn slot(&self, p: usize, c: u32) -> usize {
        p * (self.k as usize + 1) + c as usize
    }

    fn assign(&mut self, p: usize, c: u32) -> bool {
        self.colors[p] = c;
        self.prefix_max[p + 1] = self.prefix_max[p].max(c);
        for &ci in &self.by_penultimate[p] {
            let copy = &self.copies[ci as usize];
            let (&last, rest) = copy.split_last().expect("copies have two positions");
            if rest.iter().all(|&q| self.colors[q as usize] == c) {
                let slot = self.slot(last as usize, c);
                self.forbid[slot] += 1;
                if self.forbid[slot] == 1 {
                    self.blocked[last as usize] += 1;
                }
                self.trail[p].push((last, c));
                if self.blocked[last as usize] == self.k {
                    return false;
                }
            }
        }
        true
    }

    fn unassign(&mut self, p: usize) {
        let trail = std::mem::take(&mut self.trail[p]);
        for &(last, c) in &trail {
            let slot = self.slot(last as usize, c);
            self.forbid[slot] -= 1;
            if self.forbid[slot] == 0 {
                self.blocked[last as usize] -= 1;
            }
        }
        self.trail[p] = trail;
        self.trail[p].clear();
        self.colors[p] = 0;
    }

    /// Assigns a fixed prefix; false when it already violates a constraint.
    fn assign_prefix(&mut self, prefix: &[u32]) -> bool {
        for (p, &c) in prefix.iter().enumerate() {
            if self.forbid[self.slot(p, c)] > 0 || !self.assign(p, c) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, start: usize, budget: &mut Budget<'_>, cancel: &AtomicBool) -> Step {
        let n = self.colors.len();
        if start == n {
            return Step::Found;
        }
        let mut p = start;
        self.next[p] = 1;
        loop {
            let limit = self.k.min(self.prefix_max[p] + 1);
            let mut placed = false;
            while self.next[p] <= limit {
                let c = self.next[p];
                self.next[p] += 1;
                if self.forbid[self.slot(p, c)] > 0 {
                    continue;
                }
                if !budget.tick() {
                    return Step::Budget;
                }
                if budget.local.is_multiple_of(256) && cancel.load(Ordering::Relaxed) {
                    return Step::Cancelled;
                }
                if self.assign(p, c) {
                    placed = true;
                    break;
                }
                self.unassign(p);
            }
            if placed {
                p += 1;
                if p == n {
                    return Step::Found;
                }
                self.next[p] = 1;
                continue;
            }
            if p == start {
                return Step::Exhausted;
            }
            p -= 1;
            self.unassign(p);
        }
    }
}

fn backtrack(copies: &[Vec<u32>], n: usize, k: u32, node_cap: u64) -> (Outcome, u64) {
    let by_penultimate = index_by_penultimate(copies, n);
    let shared = AtomicU64::new(0);
    let mut budget = Budget {
        shared: &shared,
        local: 0,
        cap: node_cap,
    };
    let cancel = AtomicBool::new(false);
    let mut solver = Solver::new(copies, &by_penultimate, n, k);
    let step = solver.run(0, &mut budget, &cancel);
    budget.flush();
    let nodes = shared.load(Ordering::Relaxed);
    let outcome = match step {
        Step::Found => Outcome::Found(solver.colors),
        Step::Exhausted => Outcome::Exhausted,
        Step::Budget | Step::Cancelled => Outcome::Budget,
    };
    (outcome, nodes)
}

/// Colorings of the first `depth` positions that respect the
/// largest-used-plus-one rule.
fn prefixes(depth: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..depth {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                let top = k.min(prefix.iter().copied().max().unwrap_or(0) + 1);
                (1..=top).map(move |c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    out
}

fn backtrack_parallel(
    copies: &[Vec<u32>],
    n: usize,
    k: u32,
    node_cap: u64,
    jobs: usize,
) -> (Outcome, u64) {
    let by_penultimate = index_by_penultimate(copies, n);
    let mut depth = 0;
    while depth < n && prefixes(depth, k).len() < jobs * 8 {
        depth += 1;
    }
    let work = prefixes(depth, k);
    let shared = AtomicU64::new(0);
    let cancel = AtomicBool::new(false);
    let out_of_budget = AtomicBool::new(false);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool,
        Err(_) => return backtrack(copies, n, k, node_cap),
    };
    let found = pool.install(|| {
        work.par_iter().find_map_any(|prefix| {
            if cancel.load(Ordering::Relaxed) {
                return None;
            }
            let mut solver = Solver::new(copies, &by_penultimate, n, k);
            if !solver.assign_prefix(prefix) {
                return None;
            }
            let mut budget = Budget {
                shared: &shared,
                local: 0,
                cap: node_cap,
            };
            let step = solver.run(depth, &mut budget, &cancel);
            budget.flush();
            match step {
                Step::Found => {
                    cancel.store(true, Ordering::Relaxed);
                    Some(solver.colors)
                }
                Step::Budget => {
                    out_of_budget.store(true, Ordering::Relaxed);
                    cancel.store(true, Ordering::Relaxed);
                    None
                }
                Step::Exhausted | Step::Cancelled => None,
            }
        })
    });
    let nodes = shared.load(Ordering::Relaxed);
    let outcome = match found {
        Some(colors) => Outcome::Found(colors),
        None if out_of_budget.load(Ordering::Relaxed) => Outcome::Budget,
        None => Outcome::Exhausted,
    };
    (outcome, nodes)
}

/// Independent check of a coloring: composes every `w ∈ hom(B, C)` with
/// every `f ∈ hom(A, B)` and looks the result up in the coloring. Returns
/// the first `w` whose copy is monochromatic, with its color.
pub fn find_monochromatic<C: Category>(
    cat: &C,
    a: &C::Object,
    b: &C::Object,
    c: &C::Object,
    coloring: &Coloring<C::Morphism>,
    cap: usize,
) -> Result<Option<(C::Morphism, u32)>, CategoryError> {
    let lookup: HashMap<&C::Morphism, u32> = coloring
        .domain
        .iter()
        .zip(&coloring.colors)
        .map(|(f, &col)| (f, col))
        .collect();
    let ab = enumerate_hom(cat, a, b, cap)?;
    for w in enumerate_hom(cat, b, c, cap)? {
        let mut color = None;
        let mut mono = true;
        for f in &ab {
            let g = cat.compose(&w, f)?;
            let col = *lookup
                .get(&g)
                .ok_or_else(|| CategoryError::DomainMismatch(format!("{g:?} is not colored")))?;
            match color {
                None => color = Some(col),
                Some(prev) if prev != col => {
                    mono = false;
                    break;
                }
                Some(_) => {}
            }
        }
        if mono {
            if let Some(col) = color {
                return Ok(Some((w, col)));
            }
        }
    }
    Ok(None)
}

/// The first candidate `C` with `C → (B)^A_k`.
pub fn search_witness<C, I>(
    cat: &C,
    a: &C::Object,
    b: &C::Object,
    k: u32,
    candidates: I,
    mode: Mode,
    limits: &Limits,
) -> Result<(C::Object, ArrowReport<C::Morphism>), CategoryError>
where
    C: Category,
    I: IntoIterator<Item = C::Object>,
{
    for c in candidates {
        let report = verify_arrow(cat, a, b, &c, k, mode, limits)?;
        match report.verdict {
            Verdict::Witnessed => return Ok((c, report)),
            Verdict::Refuted(_) => {}
            Verdict::BudgetExceeded => {
                return Err(CategoryError::BudgetExceeded {
                    nodes: report.stats.nodes,
                })
            }
        }
    }
    Err(CategoryError::Exhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{ChainCategory, HyperCategory};
    use crate::ordstruct::Hypergraph;

    fn chain(a: usize, b: usize, c: usize, mode: Mode) -> ArrowReport<crate::ordstruct::Embedding> {
        verify_arrow(&ChainCategory, &a, &b, &c, 2, mode, &Limits::default()).unwrap()
    }

    #[test]
    fn pigeonhole_instances() {
        for mode in [Mode::Exhaustive, Mode::Backtrack] {
            assert!(chain(1, 2, 3, mode).is_witnessed());
            let r = chain(1, 2, 2, mode);
            let Verdict::Refuted(col) = r.verdict else {
                panic!("expected refutation")
            };
            assert_eq!(col.colors, vec![1, 2]);
        }
    }

    #[test]
    fn refutations_replay_independently() {
        for mode in [Mode::Exhaustive, Mode::Backtrack] {
            let r = chain(2, 3, 5, mode);
            let Verdict::Refuted(col) = r.verdict else {
                panic!("expected refutation")
            };
            let mono = find_monochromatic(&ChainCategory, &2, &3, &5, &col, 1000).unwrap();
            assert!(mono.is_none());
        }
    }

    #[test]
    fn modes_agree_on_small_chains() {
        for a in 1..=2 {
            for b in a..=3 {
                for c in b..=5 {
                    let e = chain(a, b, c, Mode::Exhaustive);
                    let t = chain(a, b, c, Mode::Backtrack);
                    assert_eq!(e.verdict, t.verdict, "A={a} B={b} C={c}");
                }
            }
        }
    }

    #[test]
    fn parallel_search_matches_verdict() {
        let limits = Limits {
            jobs: 4,
            ..Limits::default()
        };
        for (c, witnessed) in [(5, false), (6, true)] {
            let r = verify_arrow(&ChainCategory, &2, &3, &c, 2, Mode::Backtrack, &limits).unwrap();
            assert_eq!(r.is_witnessed(), witnessed);
            assert!(!r.deterministic);
            if let Verdict::Refuted(col) = &r.verdict {
                assert!(find_monochromatic(&ChainCategory, &2, &3, &c, col, 1000)
                    .unwrap()
                    .is_none());
            }
        }
    }

    #[test]
    fn budget_is_reported_distinctly() {
        let limits = Limits {
            node_cap: 10,
            ..Limits::default()
        };
        let r = verify_arrow(&ChainCategory, &2, &3, &6, 2, Mode::Backtrack, &limits).unwrap();
        assert_eq!(r.verdict, Verdict::BudgetExceeded);
        assert!(matches!(
            search_witness(&ChainCategory, &2, &3, 2, 3..=8, Mode::Backtrack, &limits),
            Err(CategoryError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn witness_search() {
        let l = Limits::default();
        let (c, _) = search_witness(&ChainCategory, &1, &2, 2, 1.., Mode::Exhaustive, &l).unwrap();
        assert_eq!(c, 3);
        let (c, _) = search_witness(&ChainCategory, &2, &3, 2, 3..=8, Mode::Backtrack, &l).unwrap();
        assert_eq!(c, 6);
        assert_eq!(
            search_witness(&ChainCategory, &2, &3, 2, 3..=5, Mode::Backtrack, &l).unwrap_err(),
            CategoryError::Exhausted
        );
        let point = Hypergraph::edgeless(2, 1).unwrap();
        let h = HyperCategory::new(2);
        let (c, _) =
            search_witness(&h, &point, &point, 2, [point.clone()], Mode::Exhaustive, &l).unwrap();
        assert_eq!(c, point);
    }

    #[test]
    fn preconditions() {
        let l = Limits::default();
        assert_eq!(
            verify_arrow(&ChainCategory, &3, &2, &4, 2, Mode::Exhaustive, &l).unwrap_err(),
            CategoryError::EmptyHom
        );
        assert_eq!(
            verify_arrow(&ChainCategory, &1, &2, &3, 1, Mode::Exhaustive, &l).unwrap_err(),
            CategoryError::BadColorCount(1)
        );
        assert!(matches!(
            verify_arrow(&ChainCategory, &1, &2, &40, 2, Mode::Exhaustive, &l),
            Err(CategoryError::SizeLimitExceeded { .. })
        ));
    }

    #[test]
    fn three_colors() {
        let l = Limits::default();
        // pigeonhole with three colors needs four points
        for mode in [Mode::Exhaustive, Mode::Backtrack] {
            let r3 = verify_arrow(&ChainCategory, &1, &2, &3, 3, mode, &l).unwrap();
            let r4 = verify_arrow(&ChainCategory, &1, &2, &4, 3, mode, &l).unwrap();
            assert!(r3.is_refuted());
            assert!(r4.is_witnessed());
        }
    }
}
