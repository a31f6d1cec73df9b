//! Brute-force reference implementations.
//!
//! Everything here works on explicit word sets and quantifies over ring
//! elements directly — no Howell forms, no generator triples, no divisor
//! lattice — so results can be compared against the structured fast paths
//! without sharing any code with them. Costs are exponential; every entry
//! point takes a budget and refuses work beyond it rather than stalling.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly_cyclic::CyclicWord;
use crate::ring_tower::{ExtensionContext, Level, RingElem};

/// A finite set of cyclic words, sorted and deduplicated, with set equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WordSet {
    level: Level,
    n: usize,
    words: Vec<CyclicWord>,
}

impl WordSet {
    pub fn from_words(level: Level, n: usize, mut words: Vec<CyclicWord>) -> Result<Self> {
        for w in &words {
            if w.level() != level || w.len() != n {
                return Err(Error::ContextMismatch);
            }
        }
        words.sort();
        words.dedup();
        Ok(WordSet { level, n, words })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    #[inline]
    pub fn level(&self) -> Level {
        self.level
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[CyclicWord] {
        &self.words
    }

    pub fn contains(&self, w: &CyclicWord) -> bool {
        self.words.binary_search(w).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CyclicWord> {
        self.words.iter()
    }
}

fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// The `R`-module generated by the words and all their cyclic shifts,
/// accumulated one generator at a time: `span ← span + R·gen`. The result is
/// closed under shifts and addition by construction; shift closure is
/// re-verified on the way out.
pub fn brute_span(
    ctx: &Arc<ExtensionContext>,
    n: usize,
    gens: &[CyclicWord],
    budget: u64,
) -> Result<WordSet> {
    let level = gens.first().map_or(Level::S, CyclicWord::level);
    let mut shifted = Vec::new();
    for g in gens {
        if g.len() != n || g.level() != level {
            return Err(Error::ContextMismatch);
        }
        for k in 0..n {
            shifted.push(g.shift(k));
        }
    }
    let scalars: Vec<RingElem> = ctx.elements(Level::R).collect();
    let mut span: BTreeSet<CyclicWord> = BTreeSet::new();
    span.insert(CyclicWord::zero(ctx, level, n));
    for g in &shifted {
        check_budget(span.len() as u128 * scalars.len() as u128, budget)?;
        let mut next = BTreeSet::new();
        for s in &span {
            for c in &scalars {
                let t = g.scale(ctx, c)?;
                next.insert(s.add(ctx, &t)?);
            }
        }
        span = next;
    }
    let words: Vec<CyclicWord> = span.into_iter().collect();
    // paranoia: the set must be shift-closed
    for w in &words {
        debug_assert!(words.binary_search(&w.shift(1)).is_ok());
    }
    WordSet::from_words(level, n, words)
}

/// Iterate every length-`n` word over a level, in canonical order.
fn ambient_words(
    ctx: &Arc<ExtensionContext>,
    level: Level,
    n: usize,
) -> impl Iterator<Item = CyclicWord> {
    let elems: Vec<RingElem> = ctx.elements(level).collect();
    let mut idx = vec![0usize; n];
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let w = CyclicWord::from_coeffs(level, idx.iter().map(|&i| elems[i].clone()).collect())
            .unwrap();
        let mut i = idx.len();
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < elems.len() {
                break;
            }
            idx[i] = 0;
        }
        Some(w)
    })
}

/// Trace dual of a word set by definition: sweep the whole ambient space
/// `S^n` and keep the words with `w ⊛ c = 0` against every member `c`.
pub fn brute_dual(ctx: &Arc<ExtensionContext>, set: &WordSet, budget: u64) -> Result<WordSet> {
    if set.level() != Level::S {
        return Err(Error::LevelMismatch {
            expected: Level::S,
            found: set.level(),
        });
    }
    let n = set.n();
    check_budget(ctx.element_count(Level::S).pow(n as u32), budget)?;
    let mut out = Vec::new();
    'cand: for w in ambient_words(ctx, Level::S, n) {
        for c in set.iter() {
            if !w.circledast(ctx, c)?.is_zero() {
                continue 'cand;
            }
        }
        out.push(w);
    }
    WordSet::from_words(Level::S, n, out)
}

/// Euclidean dual of an `R`-word set under `u ⋆ v = Σ u_i v_i`, by the same
/// ambient sweep.
pub fn brute_euclidean_dual(
    ctx: &Arc<ExtensionContext>,
    set: &WordSet,
    budget: u64,
) -> Result<WordSet> {
    if set.level() != Level::R {
        return Err(Error::LevelMismatch {
            expected: Level::R,
            found: set.level(),
        });
    }
    let n = set.n();
    check_budget(ctx.element_count(Level::R).pow(n as u32), budget)?;
    let mut out = Vec::new();
    'cand: for w in ambient_words(ctx, Level::R, n) {
        for c in set.iter() {
            if !w.star(ctx, c)?.is_zero() {
                continue 'cand;
            }
        }
        out.push(w);
    }
    WordSet::from_words(Level::R, n, out)
}

/// All pairwise sums `a + b`.
pub fn brute_sum(
    ctx: &Arc<ExtensionContext>,
    a: &WordSet,
    b: &WordSet,
    budget: u64,
) -> Result<WordSet> {
    if a.level() != b.level() || a.n() != b.n() {
        return Err(Error::ContextMismatch);
    }
    check_budget(a.len() as u128 * b.len() as u128, budget)?;
    let mut out = BTreeSet::new();
    for x in a.iter() {
        for y in b.iter() {
            out.insert(x.add(ctx, y)?);
        }
    }
    WordSet::from_words(a.level(), a.n(), out.into_iter().collect())
}

/// Sorted-merge intersection.
pub fn brute_intersect(a: &WordSet, b: &WordSet) -> Result<WordSet> {
    if a.level() != b.level() || a.n() != b.n() {
        return Err(Error::ContextMismatch);
    }
    let words: Vec<CyclicWord> = a.iter().filter(|w| b.contains(w)).cloned().collect();
    WordSet::from_words(a.level(), a.n(), words)
}

/// Complementary pair by definition: trivial intersection and the sum is the
/// whole ambient module.
pub fn brute_acp(
    ctx: &Arc<ExtensionContext>,
    a: &WordSet,
    b: &WordSet,
    budget: u64,
) -> Result<bool> {
    let inter = brute_intersect(a, b)?;
    if inter.len() != 1 {
        return Ok(false); // more than just zero in common
    }
    let sum = brute_sum(ctx, a, b, budget)?;
    let ambient = ctx.element_count(a.level()).pow(a.n() as u32);
    Ok(sum.len() as u128 == ambient)
}
