//! Additive cyclic codes over `S` and their canonical generator triples.
//!
//! An additive cyclic code of length `n` is an `R`-submodule of
//! `S_n = S[x]/(x^n - 1)` closed under multiplication by `x`. Writing
//! `S = R ⊕ μR`, every codeword flattens to a length-`2n` `R`-vector
//! `(a | b)`, so a code is exactly a row module over `R` that is stable
//! under the simultaneous cyclic shift of both halves — which is how
//! [`RawModule`] stores it, as a canonical Howell form.
//!
//! A **free** code whose projection `ψ(C) = {a : a + μb ∈ C}` and kernel
//! part `{b : μb ∈ C}` are generated by divisors of `x^n - 1` is presented
//! by a triple `(f, r, g)`: `C = ⟨f·(1 + μr), μg⟩` with `f, g` monic
//! divisors of `x^n - 1` and `deg(r) < deg(g) - deg(gcd(f, g))`. The
//! mixing polynomial only matters modulo the cyclic span of `g`, and the
//! multiples of `f` inside a coset of that span differ by multiples of
//! `lcm(f, g)`, so `r` is determined exactly modulo `g / gcd(f, g)` — the
//! reduced representative makes the triple unique. (The tighter bound
//! `deg(fr) < deg(g)` would be enough only when `f` divides `g`: the dual
//! of `⟨1 + μ(x+1)⟩` at `n = 2` over `F₉|F₃` is `⟨(x+1)(1+2μ), μ(x+2)⟩`
//! and no triple with `deg(fr) < 1` reaches it.) `ψ(C) = ⟨f⟩`, the kernel
//! part is `μ⟨g⟩`, and the rank is `(n - deg f) + (n - deg g)`. Not every
//! free code has such a presentation — `⟨p + μ⟩` at length 1 is free with
//! non-free projection `pR` — and extraction reports those honestly as
//! [`Error::NoCanonicalForm`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain_linalg::{
    module_intersect, module_sum, solve_left, ChainMat, HowellForm, RankProfile,
};
use crate::error::{Error, Result};
use crate::poly_cyclic::{factor_xn1, CyclicWord, Divisor, FactorBasis, RPoly};
use crate::ring_tower::{ExtensionContext, Level, RingElem};

/// A shift-closed `R`-submodule of `S_n` in flattened canonical form.
#[derive(Clone)]
pub struct RawModule {
    basis: Arc<FactorBasis>,
    hf: HowellForm,
}

impl PartialEq for RawModule {
    fn eq(&self, other: &Self) -> bool {
        self.basis.n() == other.basis.n() && self.hf.h == other.hf.h
    }
}
impl Eq for RawModule {}

impl std::fmt::Debug for RawModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "RawModule(n={}, log|C|={}, rows={})",
            self.basis.n(),
            self.log_cardinality(),
            self.hf.h.rows()
        )
    }
}

impl RawModule {
    /// Span of the words and all their shifts, as an `R`-module.
    pub fn span(basis: &Arc<FactorBasis>, words: &[CyclicWord]) -> Result<RawModule> {
        Self::span_in_basis(basis, words, basis.context().mu())
    }

    /// Same span, but flattened against an alternative generator `μ' = cμ`
    /// (`c` a unit): the word `a + μb` is recorded as `(a | c^{-1} b)`.
    /// Exists to certify that nothing downstream depends on which square
    /// root of `θ` the tower happened to pick.
    pub fn span_in_basis(
        basis: &Arc<FactorBasis>,
        words: &[CyclicWord],
        mu_prime: &RingElem,
    ) -> Result<RawModule> {
        let ctx = basis.context();
        let n = basis.n();
        let (mz, c) = ctx.decompose(mu_prime)?;
        if !mz.is_zero() || !ctx.is_unit(&c) {
            return Err(Error::InvalidParameter(
                "alternative μ must be a unit multiple of μ".into(),
            ));
        }
        let cinv = ctx.inv(&c)?;
        let mut rows = Vec::new();
        for w in words {
            if w.len() != n || w.level() != Level::S {
                return Err(Error::ContextMismatch);
            }
            for k in 0..n {
                let s = w.shift(k);
                let a = s.a_part(ctx)?;
                let b = s.b_part(ctx)?.scale(ctx, &cinv)?;
                let mut flat = a.coeffs().to_vec();
                flat.extend_from_slice(b.coeffs());
                rows.push(flat);
            }
        }
        let mat = ChainMat::from_rows(ctx.clone(), Level::R, 2 * n, rows)?;
        Ok(RawModule {
            basis: basis.clone(),
            hf: mat.howell().h.howell(),
        })
    }

    /// Wrap an already-flattened row module (width `2n`).
    pub fn from_flat(basis: &Arc<FactorBasis>, mat: &ChainMat) -> Result<RawModule> {
        if mat.cols() != 2 * basis.n() || mat.level() != Level::R {
            return Err(Error::ShapeError("flattened module must be R^{2n}".into()));
        }
        Ok(RawModule {
            basis: basis.clone(),
            hf: mat.howell().h.howell(),
        })
    }

    pub fn basis(&self) -> &Arc<FactorBasis> {
        &self.basis
    }

    /// Canonical Howell matrix; equal matrices mean equal modules.
    pub fn mat(&self) -> &ChainMat {
        &self.hf.h
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn contains(&self, w: &CyclicWord) -> Result<bool> {
        let ctx = self.basis.context();
        if w.len() != self.n() || w.level() != Level::S {
            return Err(Error::ContextMismatch);
        }
        Ok(self.hf.is_member(&w.flatten(ctx)?))
    }

    pub fn rank_profile(&self) -> RankProfile {
        self.hf.h.rank_profile()
    }

    pub fn is_free(&self) -> bool {
        self.hf.h.smith_profile().iter().all(|&v| v == 0)
    }

    /// An honest free basis of the module, when one exists: the canonical
    /// rows whose residues are linearly independent over the residue
    /// field. For a free module of rank `k` the greedy subset has exactly
    /// `k` rows and generates by Nakayama, and `k` generators of a free
    /// rank-`k` module over a local ring form a basis. Canonical rows can
    /// outnumber the rank even for free modules (a shadow row is a
    /// `p`-multiple of an earlier one), which is why the residue filter is
    /// needed. Non-free modules are rejected with [`Error::NotFree`].
    pub fn free_basis_words(&self) -> Result<Vec<CyclicWord>> {
        if !self.is_free() {
            return Err(Error::NotFree);
        }
        let ctx = self.basis.context();
        let rank = (self.log_cardinality() / ctx.e()) as usize;
        let res_ctx = ExtensionContext::new(ctx.p(), 1, ctx.m())?;
        let words = self.words_of_rows()?;
        let mut kept = Vec::with_capacity(rank);
        let mut kept_res: Vec<Vec<RingElem>> = Vec::new();
        for (i, w) in words.iter().enumerate() {
            if kept.len() == rank {
                break;
            }
            let res_row: Vec<RingElem> = self
                .hf
                .h
                .row(i)
                .iter()
                .map(|c| {
                    let digits: Vec<u64> = c.coeffs().iter().map(|&d| d % ctx.p()).collect();
                    res_ctx.r_elem(&digits)
                })
                .collect::<Result<_>>()?;
            let mut trial = kept_res.clone();
            trial.push(res_row.clone());
            let cols = 2 * self.n();
            let mat = ChainMat::from_rows(res_ctx.clone(), Level::R, cols, trial)?;
            if mat.rank_profile().free_rank == kept_res.len() + 1 {
                kept.push(w.clone());
                kept_res.push(res_row);
            }
        }
        debug_assert_eq!(kept.len(), rank);
        Ok(kept)
    }

    /// `log_q |C|`.
    pub fn log_cardinality(&self) -> u32 {
        let e = self.basis.context().e();
        self.hf.pivots.iter().map(|&(_, v)| e - v).sum()
    }

    pub fn cardinality(&self) -> u128 {
        (self.basis.context().q() as u128).pow(self.log_cardinality())
    }

    pub fn is_zero(&self) -> bool {
        self.hf.h.rows() == 0
    }

    pub fn is_full(&self) -> bool {
        self.log_cardinality() == 2 * self.n() as u32 * self.basis.context().e()
    }

    pub fn sum(&self, other: &RawModule) -> Result<RawModule> {
        if self.basis.n() != other.basis.n() {
            return Err(Error::ContextMismatch);
        }
        let s = module_sum(&self.hf.h, &other.hf.h)?;
        Ok(RawModule {
            basis: self.basis.clone(),
            hf: s.howell(),
        })
    }

    pub fn intersect(&self, other: &RawModule) -> Result<RawModule> {
        if self.basis.n() != other.basis.n() {
            return Err(Error::ContextMismatch);
        }
        let s = module_intersect(&self.hf.h, &other.hf.h)?;
        Ok(RawModule {
            basis: self.basis.clone(),
            hf: s.howell(),
        })
    }

    /// Image under the coordinate reversal `i ↦ n - 1 - i`.
    pub fn reversed(&self) -> Result<RawModule> {
        let words: Vec<CyclicWord> = self
            .words_of_rows()?
            .into_iter()
            .map(|w| w.reversed())
            .collect();
        RawModule::span(&self.basis, &words)
    }

    /// The rows of the canonical matrix, as `S`-words.
    pub fn words_of_rows(&self) -> Result<Vec<CyclicWord>> {
        let ctx = self.basis.context();
        (0..self.hf.h.rows())
            .map(|i| CyclicWord::unflatten(ctx, self.hf.h.row(i)))
            .collect()
    }

    /// Every codeword, by sweeping canonical coefficients over the Howell
    /// rows: row `i` with pivot valuation `v_i` takes coefficients with
    /// digits below `p^{e-v_i}`, each word exactly once.
    pub fn enumerate_words(&self, budget: u64) -> Result<Vec<CyclicWord>> {
        let ctx = self.basis.context();
        if self.cardinality() > budget as u128 {
            return Err(Error::BudgetExceeded {
                needed: self.cardinality(),
                budget,
            });
        }
        let e = ctx.e();
        let m = ctx.m() as usize;
        let radix: Vec<u64> = self.hf.pivots.iter().map(|&(_, v)| ctx.pv(e - v)).collect();
        let rows = self.hf.h.rows();
        let mut digits = vec![0u64; rows * m];
        let mut out = Vec::with_capacity(self.cardinality() as usize);
        loop {
            let mut flat = vec![ctx.zero(Level::R); 2 * self.n()];
            for i in 0..rows {
                let c = ctx.r_elem(&digits[i * m..(i + 1) * m])?;
                if c.is_zero() {
                    continue;
                }
                for j in 0..2 * self.n() {
                    let t = ctx.mul(&c, self.hf.h.at(i, j))?;
                    flat[j] = ctx.add(&flat[j], &t)?;
                }
            }
            out.push(CyclicWord::unflatten(ctx, &flat)?);
            // odometer, last digit fastest, per-row radix
            let mut i = digits.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < radix[i / m] {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    /// Smallest Hamming weight of a nonzero codeword (0 for the zero code).
    pub fn min_distance(&self, budget: u64) -> Result<usize> {
        let mut best = usize::MAX;
        for w in self.enumerate_words(budget)? {
            let wt = w.hamming_weight();
            if wt > 0 && wt < best {
                best = wt;
            }
        }
        Ok(if best == usize::MAX { 0 } else { best })
    }
}

/// Canonical Howell form of the cyclic `R`-span of one polynomial inside
/// `R^n` — the linear cyclic code `⟨p⟩`.
pub fn r_cyclic_span(basis: &FactorBasis, p: &RPoly) -> Result<ChainMat> {
    let ctx = basis.context();
    let n = basis.n();
    let w = CyclicWord::from_poly(ctx, n, p);
    let rows = (0..n).map(|k| w.shift(k).coeffs().to_vec()).collect();
    Ok(ChainMat::from_rows(ctx.clone(), Level::R, n, rows)?
        .howell()
        .h)
}

/// An additive cyclic code presented by its canonical triple.
#[derive(Clone)]
pub struct AdditiveCyclicCode {
    basis: Arc<FactorBasis>,
    f: Divisor,
    r: RPoly,
    g: Divisor,
    raw: RawModule,
    rank: usize,
}

impl PartialEq for AdditiveCyclicCode {
    fn eq(&self, other: &Self) -> bool {
        self.f.mask == other.f.mask
            && self.r == other.r
            && self.g.mask == other.g.mask
            && self.raw == other.raw
    }
}
impl Eq for AdditiveCyclicCode {}

impl std::fmt::Debug for AdditiveCyclicCode {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            fm,
            "AdditiveCyclicCode(n={}, f={}, r={}, g={})",
            self.n(),
            self.f.poly.pretty(),
            self.r.pretty(),
            self.g.poly.pretty()
        )
    }
}

impl AdditiveCyclicCode {
    /// `C = ⟨f·(1 + μr), μg⟩` for divisor masks `f`, `g` and a mixing
    /// polynomial `r`, reduced: `r = 0` or `deg(r) < deg(g) - deg(gcd(f, g))`.
    pub fn make_code(
        basis: &Arc<FactorBasis>,
        f_mask: u32,
        r: &RPoly,
        g_mask: u32,
    ) -> Result<Self> {
        let ctx = basis.context();
        let n = basis.n();
        let f = basis.divisor(f_mask)?;
        let g = basis.divisor(g_mask)?;
        if r.level() != Level::R {
            return Err(Error::LevelMismatch {
                expected: Level::R,
                found: r.level(),
            });
        }
        if !r.is_zero() {
            let bound = basis.mask_degree(g_mask) - basis.mask_degree(f_mask & g_mask);
            if r.degree().unwrap() >= bound {
                return Err(Error::DegreeBound);
            }
        }
        let fr = f.poly.mul(ctx, r)?;
        let wa = CyclicWord::from_poly(ctx, n, &f.poly);
        let wb = CyclicWord::from_poly(ctx, n, &fr);
        let w1 = CyclicWord::from_parts(ctx, &wa, &wb)?;
        let zero = CyclicWord::zero(ctx, Level::R, n);
        let w2 = CyclicWord::from_parts(ctx, &zero, &CyclicWord::from_poly(ctx, n, &g.poly))?;
        let raw = RawModule::span(basis, &[w1, w2])?;
        let rank = 2 * n - f.poly.degree().unwrap() - g.poly.degree().unwrap();
        debug_assert!(raw.is_free());
        debug_assert_eq!(raw.log_cardinality(), (rank as u32) * ctx.e());
        Ok(AdditiveCyclicCode {
            basis: basis.clone(),
            f,
            r: r.clone(),
            g,
            raw,
            rank,
        })
    }

    /// Recover the canonical triple of the span of arbitrary generator
    /// words. Fails with [`Error::NotFree`] when the span is not free and
    /// with [`Error::NoCanonicalForm`] when it is free but admits no
    /// `(f, r, g)` presentation.
    pub fn from_generators(basis: &Arc<FactorBasis>, words: &[CyclicWord]) -> Result<Self> {
        let raw = RawModule::span(basis, words)?;
        Self::from_raw(basis, raw)
    }

    /// Triple extraction from an already-spanned module.
    pub fn from_raw(basis: &Arc<FactorBasis>, raw: RawModule) -> Result<Self> {
        let ctx = basis.context();
        let n = basis.n();
        let full = basis.full_mask();
        if raw.is_zero() {
            let zero = Self::make_code(basis, full, &RPoly::zero(Level::R), full)?;
            debug_assert!(zero.raw.is_zero());
            return Ok(zero);
        }
        if !raw.is_free() {
            return Err(Error::NotFree);
        }
        let h = &raw.hf.h;

        // projection ψ(C): the span of the a-halves of the canonical rows
        let a_rows: Vec<Vec<RingElem>> = (0..h.rows()).map(|i| h.row(i)[..n].to_vec()).collect();
        let proj = ChainMat::from_rows(ctx.clone(), Level::R, n, a_rows)?
            .howell()
            .h;
        let f = self::match_divisor(basis, &proj).ok_or_else(|| {
            Error::NoCanonicalForm("projection is not generated by a divisor of x^n - 1".into())
        })?;

        // kernel part: rows whose pivot sits in the b-half have zero a-half
        let b_rows: Vec<Vec<RingElem>> = raw
            .hf
            .pivots
            .iter()
            .enumerate()
            .filter(|&(_, &(col, _))| col >= n)
            .map(|(i, _)| h.row(i)[n..].to_vec())
            .collect();
        let kern = ChainMat::from_rows(ctx.clone(), Level::R, n, b_rows)?
            .howell()
            .h;
        let g = self::match_divisor(basis, &kern).ok_or_else(|| {
            Error::NoCanonicalForm("kernel part is not generated by a divisor of x^n - 1".into())
        })?;

        // mixing polynomial: take any codeword with a-part f; its b-part
        // b0 is determined modulo the cyclic span of g, so r is recovered
        // by solving f·r + u·g = b0 in R_n (a plain polynomial remainder
        // would test only one coset representative and miss valid triples)
        let f_word = CyclicWord::from_poly(ctx, n, &f.poly);
        let target: Vec<RingElem> = f_word.coeffs().to_vec();
        let a_block = {
            let rows = (0..h.rows()).map(|i| h.row(i)[..n].to_vec()).collect();
            ChainMat::from_rows(ctx.clone(), Level::R, n, rows)?
        };
        let x = solve_left(&a_block, &target)
            .ok_or_else(|| Error::NoCanonicalForm("no codeword projects onto f".into()))?;
        let mut b0 = vec![ctx.zero(Level::R); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                let t = ctx.mul(xi, h.at(i, n + j))?;
                b0[j] = ctx.add(&b0[j], &t)?;
            }
        }
        let deg_g = g.poly.degree().expect("divisors are monic");
        let dr = deg_g - basis.mask_degree(f.mask & g.mask); // deg(r) < dr
        let g_word = CyclicWord::from_poly(ctx, n, &g.poly);
        let mut sys_rows: Vec<Vec<RingElem>> = Vec::with_capacity(dr + n);
        for i in 0..dr {
            sys_rows.push(f_word.shift(i).coeffs().to_vec());
        }
        for j in 0..n {
            sys_rows.push(g_word.shift(j).coeffs().to_vec());
        }
        let sys = ChainMat::from_rows(ctx.clone(), Level::R, n, sys_rows)?;
        let sol = solve_left(&sys, &b0).ok_or_else(|| {
            Error::NoCanonicalForm("mixing part is not reachable over f and g".into())
        })?;
        let r = RPoly::from_coeffs(Level::R, sol[..dr].to_vec())?;

        // the candidate triple must rebuild the very same module
        let rebuilt = Self::make_code(basis, f.mask, &r, g.mask)?;
        if rebuilt.raw != raw {
            return Err(Error::NoCanonicalForm(
                "module is not generated by a canonical pair".into(),
            ));
        }
        Ok(AdditiveCyclicCode { raw, ..rebuilt })
    }

    pub fn basis(&self) -> &Arc<FactorBasis> {
        &self.basis
    }
    pub fn f(&self) -> &Divisor {
        &self.f
    }
    pub fn r(&self) -> &RPoly {
        &self.r
    }
    pub fn g(&self) -> &Divisor {
        &self.g
    }
    pub fn raw(&self) -> &RawModule {
        &self.raw
    }
    /// Free rank over `R`.
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn contains(&self, w: &CyclicWord) -> Result<bool> {
        self.raw.contains(w)
    }

    pub fn cardinality(&self) -> u128 {
        self.raw.cardinality()
    }

    /// The two defining generator words `f·(1 + μr)` and `μg` (the zero
    /// word is dropped).
    pub fn generator_words(&self) -> Result<Vec<CyclicWord>> {
        let ctx = self.basis.context();
        let n = self.n();
        let fr = self.f.poly.mul(ctx, &self.r)?;
        let w1 = CyclicWord::from_parts(
            ctx,
            &CyclicWord::from_poly(ctx, n, &self.f.poly),
            &CyclicWord::from_poly(ctx, n, &fr),
        )?;
        let zero = CyclicWord::zero(ctx, Level::R, n);
        let w2 = CyclicWord::from_parts(ctx, &zero, &CyclicWord::from_poly(ctx, n, &self.g.poly))?;
        Ok([w1, w2].into_iter().filter(|w| !w.is_zero()).collect())
    }

    /// Generator matrix: the canonical rows as `S`-words, one per row, in a
    /// level-`S` matrix of width `n`.
    pub fn generator_matrix(&self) -> Result<ChainMat> {
        let ctx = self.basis.context();
        let words = self.raw.words_of_rows()?;
        let rows: Vec<Vec<RingElem>> = words.iter().map(|w| w.coeffs().to_vec()).collect();
        ChainMat::from_rows(ctx.clone(), Level::S, self.n(), rows)
    }

    /// An honest free `R`-basis of the code: the first `n - deg f` cyclic
    /// shifts of `f·(1 + μr)` followed by the first `n - deg g` shifts of
    /// `μg`.  Exactly `rank` words — unlike the canonical rows, which may
    /// carry extra shadow rows even for free modules.
    pub fn basis_words(&self) -> Result<Vec<CyclicWord>> {
        let gens = self.generator_words()?;
        let deg_f = self.f.poly.degree().expect("divisors are monic");
        let deg_g = self.g.poly.degree().expect("divisors are monic");
        let n = self.n();
        let mut out = Vec::with_capacity(self.rank);
        let mut gens = gens.into_iter();
        if deg_f < n {
            let w1 = gens.next().expect("nonzero first generator");
            for i in 0..n - deg_f {
                out.push(w1.shift(i));
            }
        }
        if deg_g < n {
            let w2 = gens.next().expect("nonzero second generator");
            for j in 0..n - deg_g {
                out.push(w2.shift(j));
            }
        }
        debug_assert_eq!(out.len(), self.rank);
        Ok(out)
    }

    /// The reversed code `σ(C)`, re-extracted in canonical form.
    pub fn sigma(&self) -> Result<Self> {
        Self::from_raw(&self.basis, self.raw.reversed()?)
    }

    pub fn min_distance(&self, budget: u64) -> Result<usize> {
        self.raw.min_distance(budget)
    }

    /// Project to the residue tower (`e = 1`), where the theory of additive
    /// cyclic codes over fields applies verbatim.
    pub fn project(&self) -> Result<(Arc<FactorBasis>, AdditiveCyclicCode)> {
        let ctx = self.basis.context();
        let res_ctx = ExtensionContext::new(ctx.p(), 1, ctx.m())?;
        let res_basis = factor_xn1(&res_ctx, self.n())?;
        let code = self.project_with(&res_basis)?;
        Ok((res_basis, code))
    }

    /// Projection into a caller-supplied residue basis (must describe the
    /// residue tower of this code's context at the same length).
    pub fn project_with(&self, res_basis: &Arc<FactorBasis>) -> Result<AdditiveCyclicCode> {
        let ctx = self.basis.context();
        let res_ctx = res_basis.context();
        if res_ctx.p() != ctx.p()
            || res_ctx.e() != 1
            || res_ctx.m() != ctx.m()
            || res_basis.n() != self.n()
        {
            return Err(Error::ContextMismatch);
        }
        // the deterministic construction makes residue factors line up
        // index-by-index; check rather than trust
        for (i, fac) in self.basis.factors().iter().enumerate() {
            let res: Vec<Vec<u64>> = fac
                .to_residue(ctx)
                .coeffs()
                .iter()
                .map(|c| c.coeffs().to_vec())
                .collect();
            let expect: Vec<Vec<u64>> = res_basis.factors()[i]
                .coeffs()
                .iter()
                .map(|c| c.coeffs().to_vec())
                .collect();
            if res != expect {
                return Err(Error::ContextMismatch);
            }
        }
        let r_res = RPoly::from_coeffs(
            Level::R,
            self.r
                .coeffs()
                .iter()
                .map(|c| {
                    let digits: Vec<u64> = c.coeffs().iter().map(|&d| d % ctx.p()).collect();
                    res_ctx.r_elem(&digits)
                })
                .collect::<Result<Vec<_>>>()?,
        )?;
        AdditiveCyclicCode::make_code(res_basis, self.f.mask, &r_res, self.g.mask)
    }

    pub fn descriptor(&self) -> CodeDescriptor {
        let ctx = self.basis.context();
        CodeDescriptor {
            p: ctx.p(),
            e: ctx.e(),
            m: ctx.m(),
            n: self.n(),
            f: poly_repr(&self.f.poly),
            r: poly_repr(&self.r),
            g: poly_repr(&self.g.poly),
        }
    }
}

fn match_divisor(basis: &Arc<FactorBasis>, canonical: &ChainMat) -> Option<Divisor> {
    for mask in basis.all_masks() {
        let d = basis.divisor(mask).unwrap();
        let span = r_cyclic_span(basis, &d.poly).ok()?;
        if &span == canonical {
            return Some(d);
        }
    }
    None
}

/// One polynomial coefficient in a JSON descriptor: a bare residue for
/// towers with `m = 1`, a base-coefficient vector otherwise.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
#[serde(untagged)]
pub enum CoeffRepr {
    Scalar(u64),
    Vector(Vec<u64>),
}

/// JSON-portable description of a code: tower parameters plus the triple's
/// coefficient lists, ascending.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct CodeDescriptor {
    pub p: u64,
    pub e: u32,
    pub m: u32,
    pub n: usize,
    pub f: Vec<CoeffRepr>,
    pub r: Vec<CoeffRepr>,
    pub g: Vec<CoeffRepr>,
}

fn poly_repr(p: &RPoly) -> Vec<CoeffRepr> {
    p.coeffs()
        .iter()
        .map(|c| {
            if c.coeffs().len() == 1 {
                CoeffRepr::Scalar(c.coeffs()[0])
            } else {
                CoeffRepr::Vector(c.coeffs().to_vec())
            }
        })
        .collect()
}

fn poly_from_repr(ctx: &Arc<ExtensionContext>, repr: &[CoeffRepr]) -> Result<RPoly> {
    let m = ctx.m() as usize;
    let coeffs = repr
        .iter()
        .map(|c| match c {
            CoeffRepr::Scalar(v) => Ok(ctx.r_from_base(*v)),
            CoeffRepr::Vector(vs) if vs.len() == m => ctx.r_elem(vs),
            CoeffRepr::Vector(vs) => Err(Error::InvalidParameter(format!(
                "coefficient vector of length {} in a tower with m = {m}",
                vs.len()
            ))),
        })
        .collect::<Result<Vec<_>>>()?;
    RPoly::from_coeffs(Level::R, coeffs)
}

/// Rebuild a code from its descriptor; `f` and `g` must be monic divisors
/// of `x^n - 1` in the tower the descriptor names.
pub fn code_from_descriptor(d: &CodeDescriptor) -> Result<(Arc<FactorBasis>, AdditiveCyclicCode)> {
    let ctx = ExtensionContext::new(d.p, d.e, d.m)?;
    let basis = factor_xn1(&ctx, d.n)?;
    let f = basis.divisor_from_poly(&poly_from_repr(&ctx, &d.f)?)?;
    let g = basis.divisor_from_poly(&poly_from_repr(&ctx, &d.g)?)?;
    let r = poly_from_repr(&ctx, &d.r)?;
    let code = AdditiveCyclicCode::make_code(&basis, f.mask, &r, g.mask)?;
    Ok((basis, code))
}

/// Mixing degree bound for the divisor pair `(f, g)`: reduced mixing
/// polynomials have `deg(r) < deg(g) - deg(gcd(f, g))`.
pub(crate) fn mixing_bound(basis: &FactorBasis, f_mask: u32, g_mask: u32) -> usize {
    basis.mask_degree(g_mask) - basis.mask_degree(f_mask & g_mask)
}

/// Number of reduced mixing polynomials under a degree bound: `|R|^dr`
/// when the sweep is on, otherwise just the zero polynomial.
pub(crate) fn r_candidate_count(ctx: &ExtensionContext, dr: usize, include_r: bool) -> u128 {
    if include_r && dr > 0 {
        (ctx.q() as u128).pow(ctx.e()).pow(dr as u32)
    } else {
        1
    }
}

/// Every mixing polynomial of degree `< dr`, in odometer order (last
/// coefficient fastest); the all-zero vector (the `r = 0` triple) comes
/// first.
pub(crate) fn r_candidates(
    ctx: &Arc<ExtensionContext>,
    dr: usize,
    include_r: bool,
) -> Result<Vec<RPoly>> {
    if !(include_r && dr > 0) {
        return Ok(vec![RPoly::zero(Level::R)]);
    }
    let scalars: Vec<RingElem> = ctx.elements(Level::R).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; dr];
    loop {
        let coeffs: Vec<RingElem> = idx.iter().map(|&i| scalars[i].clone()).collect();
        out.push(RPoly::from_coeffs(Level::R, coeffs)?);
        let mut i = idx.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < scalars.len() {
                break;
            }
            idx[i] = 0;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    Ok(out)
}

/// Every canonical triple `(f, r, g)` over a factor basis: all divisor
/// pairs, and for `include_r` all reduced mixing polynomials `r` with
/// `deg(r) < deg(g) - deg(gcd(f, g))` (otherwise only `r = 0`). The count
/// is checked against the budget before anything is materialized.
pub fn enumerate_triples(
    basis: &Arc<FactorBasis>,
    include_r: bool,
    budget: u64,
) -> Result<Vec<(u32, RPoly, u32)>> {
    let ctx = basis.context();
    let mut needed: u128 = 0;
    for fm in basis.all_masks() {
        for gm in basis.all_masks() {
            needed += r_candidate_count(ctx, mixing_bound(basis, fm, gm), include_r);
        }
    }
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::with_capacity(needed as usize);
    for fm in basis.all_masks() {
        for gm in basis.all_masks() {
            for r in r_candidates(ctx, mixing_bound(basis, fm, gm), include_r)? {
                out.push((fm, r, gm));
            }
        }
    }
    Ok(out)
}
