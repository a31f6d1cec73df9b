//! Exhaustive duality and membership checks against definitional oracles.
//!
//! The fast paths — Howell-form duals, canonical triple extraction,
//! membership solving — are compared word-for-word with ambient sweeps
//! that apply the definitions directly: the trace dual of `C` is every
//! word of `S_n` that pairs to zero with every member of `C`, and the
//! extraction of a triple must rebuild the very module it came from.

use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringcodes::additive_codes::{enumerate_triples, AdditiveCyclicCode, RawModule};
use ringcodes::error::Error;
use ringcodes::oracle::{brute_dual, WordSet};
use ringcodes::poly_cyclic::{factor_xn1, FactorBasis, RPoly};
use ringcodes::ring_tower::{ExtensionContext, Level};
use ringcodes::trace_duality::{trace_dual, trace_dual_raw};

fn tower(p: u64, e: u32, m: u32, n: usize) -> (Arc<ExtensionContext>, Arc<FactorBasis>) {
    let ctx = ExtensionContext::new(p, e, m).unwrap();
    let basis = factor_xn1(&ctx, n).unwrap();
    (ctx, basis)
}

/// Every triple on the length-2 grid: the Howell-form trace dual equals
/// the ambient sweep, cardinalities balance, the raw double dual returns
/// home, and canonical extraction of the dual succeeds exactly when the
/// dual projection is a divisor span.
fn grid_duals_match(p: u64, e: u32, m: u32, expected_triples: usize, expected_no_triple: usize) {
    let (ctx, basis) = tower(p, e, m, 2);
    let triples = enumerate_triples(&basis, true, 1 << 20).unwrap();
    assert_eq!(triples.len(), expected_triples);
    let ambient_size = ctx.element_count(Level::S).pow(2);
    let ambient = AdditiveCyclicCode::make_code(&basis, 0, &RPoly::zero(Level::R), 0)
        .unwrap()
        .raw()
        .enumerate_words(1 << 24)
        .unwrap();
    assert_eq!(ambient.len() as u128, ambient_size);

    let mut no_triple = 0usize;
    for (fm, r, gm) in &triples {
        let code = AdditiveCyclicCode::make_code(&basis, *fm, r, *gm).unwrap();
        let label = || format!("({fm}, {}, {gm})", r.pretty());

        // enumeration agrees with cardinality and membership
        let words = code.raw().enumerate_words(1 << 24).unwrap();
        assert_eq!(
            words.len() as u128,
            code.cardinality(),
            "size of {}",
            label()
        );
        let set = WordSet::from_words(Level::S, 2, words).unwrap();
        for w in set.iter() {
            assert!(code.contains(w).unwrap(), "member of {}", label());
        }
        // a fixed stride through the ambient probes non-members too
        for w in ambient.iter().step_by(97) {
            assert_eq!(
                code.contains(w).unwrap(),
                set.contains(w),
                "probe in {}",
                label()
            );
        }

        // the fast dual is the definitional dual
        let dual_raw = trace_dual_raw(code.raw()).unwrap();
        let dual_words = dual_raw.enumerate_words(1 << 24).unwrap();
        let dual_set = WordSet::from_words(Level::S, 2, dual_words).unwrap();
        let brute = brute_dual(&ctx, &set, 1 << 26).unwrap();
        assert_eq!(dual_set, brute, "dual of {}", label());
        assert_eq!(code.cardinality() * dual_raw.cardinality(), ambient_size);
        assert_eq!(&trace_dual_raw(&dual_raw).unwrap(), code.raw());

        // canonical extraction, where a triple exists at all
        match trace_dual(&code) {
            Ok(dual) => {
                assert_eq!(dual.raw(), &dual_raw, "canonical dual of {}", label());
                assert_eq!(
                    trace_dual(&dual).unwrap(),
                    code,
                    "involution at {}",
                    label()
                );
            }
            Err(Error::NoCanonicalForm(_)) => no_triple += 1,
            Err(other) => panic!("dual of {} failed: {other:?}", label()),
        }
    }
    assert_eq!(no_triple, expected_no_triple);
}

#[test]
fn z9_grid_duals_match_the_ambient_sweep() {
    // 44 duals have projections like ⟨3 + 6x⟩ that no divisor generates
    grid_duals_match(3, 2, 1, 144, 44);
}

#[test]
fn f9_grid_duals_match_the_ambient_sweep() {
    // over a field every additive cyclic code carries a triple
    grid_duals_match(3, 1, 1, 36, 0);
}

#[test]
fn sampled_duals_at_n4_balance_and_pair_to_zero() {
    let (ctx, basis) = tower(3, 2, 1, 4);
    let triples = enumerate_triples(&basis, true, 1 << 20).unwrap();
    assert_eq!(triples.len(), 12096);
    let ambient_size = ctx.element_count(Level::S).pow(4);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let picks: std::collections::BTreeSet<usize> = (0..40)
        .map(|_| (rng.next_u64() % triples.len() as u64) as usize)
        .collect();
    for idx in picks {
        let (fm, r, gm) = &triples[idx];
        let code = AdditiveCyclicCode::make_code(&basis, *fm, r, *gm).unwrap();
        let dual_raw = trace_dual_raw(code.raw()).unwrap();
        assert_eq!(code.cardinality() * dual_raw.cardinality(), ambient_size);
        assert_eq!(&trace_dual_raw(&dual_raw).unwrap(), code.raw());
        // every generator of C pairs to zero with every row of the dual
        let dual_rows = dual_raw.words_of_rows().unwrap();
        for w in code.generator_words().unwrap() {
            for v in &dual_rows {
                for k in 0..4 {
                    assert!(w.shift(k).circledast(&ctx, v).unwrap().is_zero());
                }
            }
        }
        if let Ok(dual) = trace_dual(&code) {
            assert_eq!(dual.raw(), &dual_raw);
            assert_eq!(trace_dual(&dual).unwrap(), code);
        }
    }
}

/// Flattening against `μ' = 2μ` must not change any structural answer:
/// the recorded matrices differ, but cardinality, freeness, and the rank
/// profile are properties of the module itself.
#[test]
fn structure_is_independent_of_the_square_root_choice() {
    let (ctx, basis) = tower(3, 2, 1, 2);
    let two = ctx.r_from_base(2);
    let mu2 = ctx.scale(&two, ctx.mu()).unwrap();
    for (fm, r, gm) in enumerate_triples(&basis, true, 1 << 20).unwrap() {
        let code = AdditiveCyclicCode::make_code(&basis, fm, &r, gm).unwrap();
        let gens = code.generator_words().unwrap();
        let alt = RawModule::span_in_basis(&basis, &gens, &mu2).unwrap();
        assert_eq!(alt.log_cardinality(), code.raw().log_cardinality());
        assert_eq!(alt.is_free(), code.raw().is_free());
        assert_eq!(alt.rank_profile(), code.raw().rank_profile());
    }
}
