//! Grid-level audits of the duality and complementarity laws.
//!
//! Each test sweeps a complete family — every divisor pair, every
//! canonical pair, every random matrix of a seeded batch — and checks a
//! law against an independent evaluation: closed-form duals against the
//! kernel computation, the four complementarity criteria against each
//! other, reversal duality against reconstruction, divisibility against
//! the pairing sweep, and the Howell laws against brute enumeration.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringcodes::acp::{acp_verdict, audit_pair, construct_acp_pairs, is_acp_definitional};
use ringcodes::additive_codes::{enumerate_triples, AdditiveCyclicCode};
use ringcodes::chain_linalg::ChainMat;
use ringcodes::poly_cyclic::{factor_xn1, CyclicWord, FactorBasis, RPoly};
use ringcodes::ring_tower::{ExtensionContext, Level, RingElem};
use ringcodes::trace_duality::{closed_form_dual, lemma_xn1_equiv, trace_dual};

fn tower(p: u64, e: u32, m: u32, n: usize) -> (Arc<ExtensionContext>, Arc<FactorBasis>) {
    let ctx = ExtensionContext::new(p, e, m).unwrap();
    let basis = factor_xn1(&ctx, n).unwrap();
    (ctx, basis)
}

/// With no mixing, the dual triple is read off the reciprocals of the
/// complementary divisors; the kernel computation must land on the same
/// canonical code for every divisor pair.
#[test]
fn closed_form_duals_agree_with_the_trace_kernel() {
    for n in [2usize, 4, 8] {
        let (_, basis) = tower(3, 2, 1, n);
        for (fm, r, gm) in enumerate_triples(&basis, false, 1 << 11).unwrap() {
            let code = AdditiveCyclicCode::make_code(&basis, fm, &r, gm).unwrap();
            let closed = closed_form_dual(&code).unwrap();
            let kernel = trace_dual(&code).unwrap();
            assert_eq!(closed, kernel, "dual of ({fm}, 0, {gm}) at n = {n}");
        }
    }
}

/// For unmixed complementary pairs the dual of one side is the reversal
/// of the other: `C^⊥ = σ(D)` as canonical codes.
#[test]
fn reversal_gives_the_dual_of_the_complement_on_unmixed_pairs() {
    for n in [2usize, 4, 8] {
        let (_, basis) = tower(3, 2, 1, n);
        let pairs = construct_acp_pairs(&basis, false, 1 << 11).unwrap();
        assert_eq!(pairs.len(), 1usize << (2 * basis.factor_count()));
        for pair in &pairs {
            assert!(pair.verdict.definitional && pair.verdict.agree);
            let dual = trace_dual(&pair.c).unwrap();
            let reversed = pair.d.sigma().unwrap();
            assert_eq!(dual, reversed, "σ-duality at n = {n}");
        }
    }
}

/// The full ordered grid of canonical pairs at length 2: the matrix and
/// projection criteria agree with the definitional one everywhere, the
/// polynomial criterion is sufficient everywhere and exact on unmixed
/// pairs, and the counts are frozen.
#[test]
fn complement_criteria_agree_across_the_full_grid() {
    let (_, basis) = tower(3, 2, 1, 2);
    let codes: Vec<AdditiveCyclicCode> = enumerate_triples(&basis, true, 1 << 20)
        .unwrap()
        .into_iter()
        .map(|(fm, r, gm)| AdditiveCyclicCode::make_code(&basis, fm, &r, gm).unwrap())
        .collect();
    assert_eq!(codes.len(), 144);
    let mut acp_pairs = 0usize;
    let mut poly_pairs = 0usize;
    for c in &codes {
        for d in &codes {
            let v = acp_verdict(c, d).unwrap();
            assert_eq!(v.matrix, v.definitional, "{c:?} vs {d:?}");
            assert_eq!(v.projection, v.definitional, "{c:?} vs {d:?}");
            if v.polynomial {
                assert!(v.definitional, "{c:?} vs {d:?}");
                poly_pairs += 1;
            }
            if c.r().is_zero() && d.r().is_zero() {
                assert_eq!(v.polynomial, v.definitional, "{c:?} vs {d:?}");
            }
            if v.definitional {
                acp_pairs += 1;
            }
        }
    }
    assert_eq!(acp_pairs, 5476);
    assert_eq!(poly_pairs, 400);
}

/// Constructed complementary pairs pass all four criteria: the full mixing
/// sweep at length 2 and the unmixed grid at length 8.
#[test]
fn constructed_pairs_verify_on_all_four_criteria() {
    let (_, basis2) = tower(3, 2, 1, 2);
    let swept = construct_acp_pairs(&basis2, true, 1 << 10).unwrap();
    assert_eq!(swept.len(), 400);
    for pair in &swept {
        assert!(
            pair.verdict.definitional
                && pair.verdict.polynomial
                && pair.verdict.matrix
                && pair.verdict.projection,
            "{:?} vs {:?}",
            pair.c,
            pair.d
        );
    }
    let (_, basis8) = tower(3, 2, 1, 8);
    let unmixed = construct_acp_pairs(&basis8, false, 1 << 11).unwrap();
    assert_eq!(unmixed.len(), 1024);
    for pair in &unmixed {
        assert!(
            pair.verdict.definitional
                && pair.verdict.polynomial
                && pair.verdict.matrix
                && pair.verdict.projection,
            "{:?} vs {:?}",
            pair.c,
            pair.d
        );
    }
}

/// Complementarity is preserved by trace duality on unmixed pairs:
/// `{C, D}` splits the ambient exactly when `{C^⊥, D^⊥}` does.
#[test]
fn complementarity_transfers_to_the_duals() {
    let (_, basis) = tower(3, 2, 1, 2);
    let codes: Vec<AdditiveCyclicCode> = enumerate_triples(&basis, false, 1 << 10)
        .unwrap()
        .into_iter()
        .map(|(fm, r, gm)| AdditiveCyclicCode::make_code(&basis, fm, &r, gm).unwrap())
        .collect();
    for c in &codes {
        for d in &codes {
            let direct = is_acp_definitional(c, d).unwrap();
            let dual =
                is_acp_definitional(&trace_dual(c).unwrap(), &trace_dual(d).unwrap()).unwrap();
            assert_eq!(direct, dual, "{c:?} vs {d:?}");
        }
    }
}

/// On unmixed pairs the four component statements stand or fall together:
/// complementarity of the pair, componentwise complementarity over `R`,
/// the reversal identity on Euclidean duals, and the σ-duality of the
/// trace dual.
#[test]
fn component_equivalences_hold_without_mixing() {
    let (_, basis) = tower(3, 2, 1, 2);
    let codes: Vec<AdditiveCyclicCode> = enumerate_triples(&basis, false, 1 << 10)
        .unwrap()
        .into_iter()
        .map(|(fm, r, gm)| AdditiveCyclicCode::make_code(&basis, fm, &r, gm).unwrap())
        .collect();
    for c in &codes {
        for d in &codes {
            let rec = audit_pair(c, d).unwrap();
            assert!(rec.norem_holds);
            let items = rec.corollary_items.expect("unmixed pairs audit all items");
            assert!(
                items.iter().all(|&i| i == items[0]),
                "{c:?} vs {d:?}: {items:?}"
            );
        }
    }
}

/// A full mixing-grid audit over the field tower: every record is
/// internally consistent and none of the robust criteria dissent.
#[test]
fn field_tower_audit_is_internally_consistent() {
    let (_, basis) = tower(3, 1, 1, 2);
    let records = ringcodes::acp::audit_theorems(&basis, true, 1 << 20, None).unwrap();
    assert!(!records.is_empty());
    for rec in &records {
        assert!(rec.verdicts.definitional);
        assert!(rec.verdicts.matrix && rec.verdicts.projection);
        assert_eq!(rec.verdicts.agree, rec.verdicts.polynomial);
        assert_eq!(rec.corollary_items.is_some(), rec.norem_holds);
        let clean = rec.verdicts.agree
            && rec.norem_holds
            && rec.sigma_dual_holds
            && rec
                .corollary_items
                .is_some_and(|items| items.iter().all(|&i| i));
        assert_eq!(rec.counterexample, !clean);
    }
}

/// `x^n - 1 | a·b` is equivalent to all shifted pairings of `a` against
/// the reversal of `b` vanishing. The left side is polynomial division;
/// the right side is evaluated here as a literal double sweep.
#[test]
fn cyclic_divisibility_matches_the_pairing_sweep() {
    let star_side = |ctx: &Arc<ExtensionContext>, n: usize, a: &RPoly, b: &RPoly| -> bool {
        let wa = CyclicWord::from_poly(ctx, n, a);
        let mut rev = CyclicWord::from_poly(ctx, n, b).coeffs().to_vec();
        rev.reverse();
        let wb = CyclicWord::from_coeffs(Level::R, rev).unwrap();
        (0..n).all(|i| (0..n).all(|j| wa.shift(i).star(ctx, &wb.shift(j)).unwrap().is_zero()))
    };
    for n in [2usize, 4, 8] {
        let (ctx, basis) = tower(3, 2, 1, n);
        // all proper divisor pairs, then a seeded batch of arbitrary polys
        let mut inputs: Vec<(RPoly, RPoly)> = Vec::new();
        for fm in basis.all_masks() {
            for gm in basis.all_masks() {
                let a = basis.divisor(fm).unwrap().poly;
                let b = basis.divisor(gm).unwrap().poly;
                if a.degree().unwrap() < n && b.degree().unwrap() < n {
                    inputs.push((a, b));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(29 + n as u64);
        for _ in 0..50 {
            let mut poly = || {
                let coeffs: Vec<RingElem> = (0..n)
                    .map(|_| ctx.r_from_base(rng.next_u64() % 9))
                    .collect();
                RPoly::from_coeffs(Level::R, coeffs).unwrap()
            };
            inputs.push((poly(), poly()));
        }
        for (a, b) in inputs {
            assert_eq!(
                lemma_xn1_equiv(&basis, &a, &b).unwrap(),
                star_side(&ctx, n, &a, &b),
                "a = {}, b = {} at n = {n}",
                a.pretty(),
                b.pretty()
            );
        }
    }
}

/// Seeded random matrices over `Z₉` with at most three columns: the
/// Howell form is a canonical presentation of the row module (idempotent,
/// permutation-stable, unit-scale-stable), its pivots count the module,
/// and the row kernel is sound and complete against a brute sweep.
#[test]
fn howell_laws_hold_on_random_small_matrices() {
    let ctx = ExtensionContext::new(3, 2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for round in 0..200 {
        let rows = 1 + (rng.next_u64() % 3) as usize;
        let cols = 1 + (rng.next_u64() % 3) as usize;
        let entries: Vec<Vec<RingElem>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| ctx.r_from_base(rng.next_u64() % 9))
                    .collect()
            })
            .collect();
        let mat = ChainMat::from_rows(Arc::clone(&ctx), Level::R, cols, entries.clone()).unwrap();
        let hf = mat.howell();

        // idempotence and stability under row permutation and unit scaling
        assert_eq!(hf.h.howell().h, hf.h, "round {round}");
        let mut permuted = entries.clone();
        permuted.rotate_left(rows / 2);
        let perm = ChainMat::from_rows(Arc::clone(&ctx), Level::R, cols, permuted).unwrap();
        assert_eq!(perm.howell().h, hf.h, "round {round}");
        let two = ctx.r_from_base(2);
        let scaled_rows: Vec<Vec<RingElem>> = entries
            .iter()
            .map(|row| row.iter().map(|v| ctx.mul(&two, v).unwrap()).collect())
            .collect();
        // scaling every row by a unit leaves the row module unchanged
        let scaled = ChainMat::from_rows(Arc::clone(&ctx), Level::R, cols, scaled_rows).unwrap();
        assert_eq!(scaled.howell().h, hf.h, "round {round}");

        // brute row module: all coefficient combinations over Z₉
        let mut module: BTreeSet<Vec<u64>> = BTreeSet::new();
        let mut kernel_elems: Vec<Vec<RingElem>> = Vec::new();
        let combos = 9u64.pow(rows as u32);
        for code in 0..combos {
            let mut c = code;
            let coeffs: Vec<RingElem> = (0..rows)
                .map(|_| {
                    let digit = c % 9;
                    c /= 9;
                    ctx.r_from_base(digit)
                })
                .collect();
            let mut word = vec![ctx.zero(Level::R); cols];
            for (ci, row) in coeffs.iter().zip(&entries) {
                for (k, v) in row.iter().enumerate() {
                    let t = ctx.mul(ci, v).unwrap();
                    word[k] = ctx.add(&word[k], &t).unwrap();
                }
            }
            if word.iter().all(RingElem::is_zero) {
                kernel_elems.push(coeffs.clone());
            }
            module.insert(word.iter().map(|v| v.coeffs()[0]).collect());
        }

        // pivot valuations count the module exactly
        let profile = mat.rank_profile();
        assert_eq!(module.len() as u128, 3u128.pow(profile.log_cardinality));

        // membership: every brute word reduces to zero, every Howell row
        // is a brute word
        for word in &module {
            let elems: Vec<RingElem> = word.iter().map(|&d| ctx.r_from_base(d)).collect();
            assert!(hf.is_member(&elems), "round {round}");
        }
        for i in 0..hf.h.rows() {
            let key: Vec<u64> = hf.h.row(i).iter().map(|v| v.coeffs()[0]).collect();
            assert!(module.contains(&key), "round {round}");
        }

        // the row kernel is sound and complete
        let kern = mat.row_kernel();
        let kern_hf = kern.howell();
        for i in 0..kern.rows() {
            let mut word = vec![ctx.zero(Level::R); cols];
            for (ci, row) in kern.row(i).iter().zip(&entries) {
                for (k, v) in row.iter().enumerate() {
                    let t = ctx.mul(ci, v).unwrap();
                    word[k] = ctx.add(&word[k], &t).unwrap();
                }
            }
            assert!(word.iter().all(RingElem::is_zero), "round {round}");
        }
        for coeffs in &kernel_elems {
            assert!(kern_hf.is_member(coeffs), "round {round}");
        }
    }
}
