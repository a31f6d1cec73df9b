//! Polynomials, cyclic words, and the factorization of `x^n - 1`.
//!
//! For `gcd(n, p) = 1` the polynomial `x^n - 1` factors over `R` into
//! distinct monic basic-irreducible polynomials, one per `q`-cyclotomic
//! coset mod `n`: inside a splitting ring `E = R[u]/(G)` there is a
//! Teichmüller root `ω` of order `n`, and the factor attached to a coset `C`
//! is `∏_{i∈C} (x - ω^i)`, whose coefficients descend to `R` because `C` is
//! Frobenius-stable. Divisors of `x^n - 1` then form a Boolean lattice of
//! coset subsets, which this module exposes as bitmasks.
//!
//! Cyclic words of length `n` carry two pairings used throughout: the
//! coordinatewise product `u ⋆ v = Σ u_i v_i` and, for words over `S`, the
//! trace pairing `u ⊛ v = Tr(u ⋆ v)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring_tower::{prime_factors, ExtensionContext, Level, RingElem};

/// Dense polynomial over one tower level, ascending coefficients, no
/// trailing zeros (the zero polynomial has an empty coefficient list).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RPoly {
    level: Level,
    coeffs: Vec<RingElem>,
}

impl RPoly {
    pub fn zero(level: Level) -> Self {
        RPoly {
            level,
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: &ExtensionContext, level: Level) -> Self {
        RPoly {
            level,
            coeffs: vec![ctx.one(level)],
        }
    }

    pub fn x(ctx: &ExtensionContext, level: Level) -> Self {
        RPoly {
            level,
            coeffs: vec![ctx.zero(level), ctx.one(level)],
        }
    }

    /// `x^n - 1` at level `R`.
    pub fn xn_minus_1(ctx: &ExtensionContext, n: usize) -> Self {
        let mut coeffs = vec![ctx.zero(Level::R); n + 1];
        coeffs[0] = ctx.neg(&ctx.one(Level::R));
        coeffs[n] = ctx.one(Level::R);
        RPoly {
            level: Level::R,
            coeffs,
        }
    }

    pub fn from_coeffs(level: Level, coeffs: Vec<RingElem>) -> Result<Self> {
        for c in &coeffs {
            if c.level() != level {
                return Err(Error::LevelMismatch {
                    expected: level,
                    found: c.level(),
                });
            }
        }
        let mut p = RPoly { level, coeffs };
        p.trim();
        Ok(p)
    }

    /// Convenience for level-`R` polynomials with constant coefficients.
    pub fn from_base_coeffs(ctx: &ExtensionContext, coeffs: &[u64]) -> Self {
        let mut p = RPoly {
            level: Level::R,
            coeffs: coeffs.iter().map(|&c| ctx.r_from_base(c)).collect(),
        };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(RingElem::is_zero) {
            self.coeffs.pop();
        }
    }

    #[inline]
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the zero polynomial is `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&RingElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self, ctx: &ExtensionContext) -> bool {
        self.leading() == Some(&ctx.one(self.level))
    }

    pub fn coeff(&self, ctx: &ExtensionContext, i: usize) -> RingElem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| ctx.zero(self.level))
    }

    pub fn add(&self, ctx: &ExtensionContext, other: &RPoly) -> Result<RPoly> {
        if self.level != other.level {
            return Err(Error::LevelMismatch {
                expected: self.level,
                found: other.level,
            });
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(ctx.add(&self.coeff(ctx, i), &other.coeff(ctx, i))?);
        }
        let mut p = RPoly {
            level: self.level,
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    pub fn neg(&self, ctx: &ExtensionContext) -> RPoly {
        RPoly {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| ctx.neg(c)).collect(),
        }
    }

    pub fn sub(&self, ctx: &ExtensionContext, other: &RPoly) -> Result<RPoly> {
        self.add(ctx, &other.neg(ctx))
    }

    pub fn mul(&self, ctx: &ExtensionContext, other: &RPoly) -> Result<RPoly> {
        if self.level != other.level {
            return Err(Error::LevelMismatch {
                expected: self.level,
                found: other.level,
            });
        }
        if self.is_zero() || other.is_zero() {
            return Ok(RPoly::zero(self.level));
        }
        let mut coeffs = vec![ctx.zero(self.level); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = ctx.mul(a, b)?;
                coeffs[i + j] = ctx.add(&coeffs[i + j], &t)?;
            }
        }
        let mut p = RPoly {
            level: self.level,
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    pub fn scale(&self, ctx: &ExtensionContext, c: &RingElem) -> Result<RPoly> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(ctx.scale(c, a)?);
        }
        let mut p = RPoly {
            level: self.level,
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    /// Quotient and remainder by a monic divisor.
    pub fn divmod_monic(&self, ctx: &ExtensionContext, d: &RPoly) -> Result<(RPoly, RPoly)> {
        if self.level != d.level {
            return Err(Error::LevelMismatch {
                expected: self.level,
                found: d.level,
            });
        }
        if !d.is_monic(ctx) {
            return Err(Error::NonMonicDivisor);
        }
        let dd = d.degree().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![ctx.zero(self.level); rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap().clone();
            if !c.is_zero() {
                quo[k] = c.clone();
                for i in 0..=dd {
                    let t = ctx.mul(&c, &d.coeffs[i])?;
                    rem[k + i] = ctx.sub(&rem[k + i], &t)?;
                }
            }
            debug_assert!(rem.last().unwrap().is_zero());
            rem.pop();
        }
        let mut q = RPoly {
            level: self.level,
            coeffs: quo,
        };
        let mut r = RPoly {
            level: self.level,
            coeffs: rem,
        };
        q.trim();
        r.trim();
        Ok((q, r))
    }

    /// Does `self` divide `other`? The leading coefficient of `self` must be
    /// a unit (monic up to scale), which holds for every divisor of
    /// `x^n - 1` and every reciprocal of one.
    pub fn divides(&self, ctx: &ExtensionContext, other: &RPoly) -> Result<bool> {
        if self.is_zero() {
            return Ok(other.is_zero());
        }
        let lead = self.leading().unwrap();
        let inv = ctx.inv(lead)?;
        let monic = self.scale(ctx, &inv)?;
        let (_, rem) = other.divmod_monic(ctx, &monic)?;
        Ok(rem.is_zero())
    }

    /// Plain reciprocal `x^{deg} · f(1/x)`: the coefficient list reversed.
    pub fn reciprocal(&self) -> Result<RPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        let mut p = RPoly {
            level: self.level,
            coeffs,
        };
        p.trim(); // drops what used to be low-order zeros
        Ok(p)
    }

    /// Monic reciprocal: the reciprocal rescaled to leading coefficient one.
    /// Defined when the constant term is a unit, e.g. for divisors of
    /// `x^n - 1`. Maps roots to inverse roots, so it is an involution on
    /// such divisors.
    pub fn monic_reciprocal(&self, ctx: &ExtensionContext) -> Result<RPoly> {
        let rec = self.reciprocal()?;
        let lead = rec.leading().unwrap();
        let inv = ctx.inv(lead)?;
        rec.scale(ctx, &inv)
    }

    pub fn eval(&self, ctx: &ExtensionContext, at: &RingElem) -> Result<RingElem> {
        let mut acc = ctx.zero(self.level);
        for c in self.coeffs.iter().rev() {
            acc = ctx.mul(&acc, at)?;
            acc = ctx.add(&acc, c)?;
        }
        Ok(acc)
    }

    /// Coefficients reduced mod p (the image over the residue field).
    pub fn to_residue(&self, ctx: &ExtensionContext) -> RPoly {
        let mut p = RPoly {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| ctx.residue_reduce(c)).collect(),
        };
        p.trim();
        p
    }

    /// Human-readable form, descending powers: `x^2+4x+8`. Coefficients of
    /// extensions with `m ≥ 2` print as bracketed coefficient lists.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let fmt_coeff = |c: &RingElem| -> String {
            if c.coeffs().len() == 1 {
                format!("{}", c.coeffs()[0])
            } else {
                let inner: Vec<String> = c.coeffs().iter().map(u64::to_string).collect();
                format!("[{}]", inner.join(","))
            }
        };
        let is_unit_coeff = |c: &RingElem| c.coeffs().len() == 1 && c.coeffs()[0] == 1;
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let body = match i {
                0 => fmt_coeff(c),
                1 if is_unit_coeff(c) => "x".into(),
                1 => format!("{}x", fmt_coeff(c)),
                _ if is_unit_coeff(c) => format!("x^{i}"),
                _ => format!("{}x^{i}", fmt_coeff(c)),
            };
            parts.push(body);
        }
        parts.join("+")
    }
}

/// A length-`n` cyclic word over one tower level.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CyclicWord {
    level: Level,
    coeffs: Vec<RingElem>,
}

impl CyclicWord {
    pub fn zero(ctx: &ExtensionContext, level: Level, n: usize) -> Self {
        CyclicWord {
            level,
            coeffs: vec![ctx.zero(level); n],
        }
    }

    pub fn from_coeffs(level: Level, coeffs: Vec<RingElem>) -> Result<Self> {
        for c in &coeffs {
            if c.level() != level {
                return Err(Error::LevelMismatch {
                    expected: level,
                    found: c.level(),
                });
            }
        }
        Ok(CyclicWord { level, coeffs })
    }

    /// Image of a polynomial in the quotient by `x^n - 1`.
    pub fn from_poly(ctx: &ExtensionContext, n: usize, p: &RPoly) -> Self {
        let mut coeffs = vec![ctx.zero(p.level()); n];
        for (i, c) in p.coeffs().iter().enumerate() {
            coeffs[i % n] = ctx.add(&coeffs[i % n], c).unwrap();
        }
        CyclicWord {
            level: p.level(),
            coeffs,
        }
    }

    /// Assemble the `S`-word `a + μ b` from two `R`-words.
    pub fn from_parts(ctx: &ExtensionContext, a: &CyclicWord, b: &CyclicWord) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::ContextMismatch);
        }
        let mut coeffs = Vec::with_capacity(a.len());
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            coeffs.push(ctx.s_elem(x, y)?);
        }
        Ok(CyclicWord {
            level: Level::S,
            coeffs,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    #[inline]
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn coeffs(&self) -> &[RingElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RingElem::is_zero)
    }

    /// Multiplication by `x^k`: rotate right by `k`.
    pub fn shift(&self, k: usize) -> CyclicWord {
        let n = self.len();
        let k = k % n;
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(self.coeffs[(i + n - k) % n].clone());
        }
        CyclicWord {
            level: self.level,
            coeffs,
        }
    }

    /// Coordinate reversal `i ↦ n - 1 - i`.
    pub fn reversed(&self) -> CyclicWord {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        CyclicWord {
            level: self.level,
            coeffs,
        }
    }

    pub fn add(&self, ctx: &ExtensionContext, other: &CyclicWord) -> Result<CyclicWord> {
        if self.level != other.level || self.len() != other.len() {
            return Err(Error::ContextMismatch);
        }
        let mut coeffs = Vec::with_capacity(self.len());
        for (x, y) in self.coeffs.iter().zip(&other.coeffs) {
            coeffs.push(ctx.add(x, y)?);
        }
        Ok(CyclicWord {
            level: self.level,
            coeffs,
        })
    }

    pub fn scale(&self, ctx: &ExtensionContext, c: &RingElem) -> Result<CyclicWord> {
        let mut coeffs = Vec::with_capacity(self.len());
        for x in &self.coeffs {
            coeffs.push(ctx.scale(c, x)?);
        }
        Ok(CyclicWord {
            level: self.level,
            coeffs,
        })
    }

    /// Product in the quotient ring: cyclic convolution.
    pub fn cyclic_mul(&self, ctx: &ExtensionContext, other: &CyclicWord) -> Result<CyclicWord> {
        if self.level != other.level || self.len() != other.len() {
            return Err(Error::ContextMismatch);
        }
        let n = self.len();
        let mut coeffs = vec![ctx.zero(self.level); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = ctx.mul(a, b)?;
                let k = (i + j) % n;
                coeffs[k] = ctx.add(&coeffs[k], &t)?;
            }
        }
        Ok(CyclicWord {
            level: self.level,
            coeffs,
        })
    }

    /// `u ⋆ v = Σ u_i v_i` at the words' common level.
    pub fn star(&self, ctx: &ExtensionContext, other: &CyclicWord) -> Result<RingElem> {
        if self.level != other.level || self.len() != other.len() {
            return Err(Error::ContextMismatch);
        }
        let mut acc = ctx.zero(self.level);
        for (x, y) in self.coeffs.iter().zip(&other.coeffs) {
            let t = ctx.mul(x, y)?;
            acc = ctx.add(&acc, &t)?;
        }
        Ok(acc)
    }

    /// Trace pairing `u ⊛ v = Tr(u ⋆ v)` for words over `S`.
    pub fn circledast(&self, ctx: &ExtensionContext, other: &CyclicWord) -> Result<RingElem> {
        let s = self.star(ctx, other)?;
        ctx.trace(&s)
    }

    /// `R`-word of `a`-components of an `S`-word.
    pub fn a_part(&self, ctx: &ExtensionContext) -> Result<CyclicWord> {
        let mut coeffs = Vec::with_capacity(self.len());
        for x in &self.coeffs {
            coeffs.push(ctx.decompose(x)?.0);
        }
        Ok(CyclicWord {
            level: Level::R,
            coeffs,
        })
    }

    /// `R`-word of `b`-components of an `S`-word.
    pub fn b_part(&self, ctx: &ExtensionContext) -> Result<CyclicWord> {
        let mut coeffs = Vec::with_capacity(self.len());
        for x in &self.coeffs {
            coeffs.push(ctx.decompose(x)?.1);
        }
        Ok(CyclicWord {
            level: Level::R,
            coeffs,
        })
    }

    /// Flatten an `S`-word into the length-`2n` `R`-vector `(a | b)`.
    pub fn flatten(&self, ctx: &ExtensionContext) -> Result<Vec<RingElem>> {
        let a = self.a_part(ctx)?;
        let b = self.b_part(ctx)?;
        let mut out = a.coeffs;
        out.extend(b.coeffs);
        Ok(out)
    }

    /// Inverse of [`flatten`]: read `n` `a`-components then `n`
    /// `b`-components.
    pub fn unflatten(ctx: &ExtensionContext, flat: &[RingElem]) -> Result<CyclicWord> {
        let n = flat.len() / 2;
        if flat.len() != 2 * n {
            return Err(Error::ShapeError(
                "flattened word must have even length".into(),
            ));
        }
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(ctx.s_elem(&flat[i], &flat[i + n])?);
        }
        Ok(CyclicWord {
            level: Level::S,
            coeffs,
        })
    }

    pub fn hamming_weight(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

/// `q`-cyclotomic cosets mod `n`, each sorted ascending, ordered by smallest
/// element.
pub fn cyclotomic_cosets(n: usize, q: u64) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let qn = (q % n as u64) as usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut coset = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            coset.push(i);
            i = i * qn % n;
        }
        coset.sort_unstable();
        out.push(coset);
    }
    out
}

// ---- arithmetic over the residue field F_q, elements as reduced RingElems ----
//
// Operations compute in R and reduce coefficients mod p, which is exactly
// the residue homomorphism. Used only to select the splitting-ring modulus.

fn fq_red(ctx: &ExtensionContext, x: &RingElem) -> RingElem {
    ctx.residue_reduce(x)
}

fn fq_poly_trim(v: &mut Vec<RingElem>) {
    while v.last().is_some_and(RingElem::is_zero) {
        v.pop();
    }
}

fn fq_poly_rem(ctx: &ExtensionContext, a: &[RingElem], b: &[RingElem]) -> Vec<RingElem> {
    let mut r: Vec<RingElem> = a.iter().map(|c| fq_red(ctx, c)).collect();
    fq_poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = fq_red(
        ctx,
        &ctx.inv(&b[db])
            .expect("nonzero residue leading coefficient"),
    );
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = fq_red(ctx, &ctx.mul(r.last().unwrap(), &lead_inv).unwrap());
        if !c.is_zero() {
            for i in 0..=db {
                let t = fq_red(ctx, &ctx.mul(&c, &b[i]).unwrap());
                r[k + i] = fq_red(ctx, &ctx.sub(&r[k + i], &t).unwrap());
            }
        }
        debug_assert!(r.last().unwrap().is_zero());
        r.pop();
        fq_poly_trim(&mut r);
    }
    r
}

fn fq_poly_mulmod(
    ctx: &ExtensionContext,
    md: &[RingElem],
    a: &[RingElem],
    b: &[RingElem],
) -> Vec<RingElem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut t = vec![ctx.zero(Level::R); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let s = fq_red(ctx, &ctx.mul(x, y).unwrap());
            t[i + j] = fq_red(ctx, &ctx.add(&t[i + j], &s).unwrap());
        }
    }
    fq_poly_trim(&mut t);
    if t.is_empty() {
        return t;
    }
    fq_poly_rem(ctx, &t, md)
}

fn fq_poly_powmod(
    ctx: &ExtensionContext,
    md: &[RingElem],
    a: &[RingElem],
    mut k: u128,
) -> Vec<RingElem> {
    let mut acc = vec![ctx.one(Level::R)];
    let mut base = fq_poly_rem(ctx, a, md);
    while k > 0 {
        if k & 1 == 1 {
            acc = fq_poly_mulmod(ctx, md, &acc, &base);
        }
        base = fq_poly_mulmod(ctx, md, &base, &base);
        k >>= 1;
    }
    acc
}

fn fq_poly_gcd(ctx: &ExtensionContext, a: &[RingElem], b: &[RingElem]) -> Vec<RingElem> {
    let mut x: Vec<RingElem> = a.iter().map(|c| fq_red(ctx, c)).collect();
    let mut y: Vec<RingElem> = b.iter().map(|c| fq_red(ctx, c)).collect();
    fq_poly_trim(&mut x);
    fq_poly_trim(&mut y);
    while !y.is_empty() {
        let r = fq_poly_rem(ctx, &x, &y);
        x = y;
        y = r;
    }
    x
}

/// Is the monic residue polynomial irreducible over `F_q`? Frobenius test:
/// `u^{q^t} = u` mod the candidate, plus coprimality at maximal subfields.
fn fq_is_irreducible(ctx: &ExtensionContext, md: &[RingElem], t: u32) -> Option<bool> {
    let q = ctx.q() as u128;
    let u = vec![ctx.zero(Level::R), ctx.one(Level::R)];
    let u_red = fq_poly_rem(ctx, &u, md);
    // subtract the class of u after reduction, so degree-1 moduli work too
    let diff_with_u = |mut a: Vec<RingElem>| -> Vec<RingElem> {
        a.resize(a.len().max(u_red.len()), ctx.zero(Level::R));
        for (x, y) in a.iter_mut().zip(&u_red) {
            *x = fq_red(ctx, &ctx.sub(x, y).unwrap());
        }
        fq_poly_trim(&mut a);
        a
    };
    let qt = q.checked_pow(t)?;
    let diff = diff_with_u(fq_poly_powmod(ctx, md, &u, qt));
    if !diff.is_empty() {
        return Some(false);
    }
    for ell in prime_factors(t as u128) {
        let sub = q.checked_pow((t as u128 / ell) as u32)?;
        let d = diff_with_u(fq_poly_powmod(ctx, md, &u, sub));
        let g = fq_poly_gcd(ctx, &d, md);
        if g.len() != 1 {
            return Some(false);
        }
    }
    Some(true)
}

/// The Galois ring `E = R[u]/(G)` used to split `x^n - 1`; `G` is the
/// lexicographically first monic irreducible of the right degree over `F_q`,
/// lifted coefficientwise.
pub(crate) struct SplitRing {
    ctx: Arc<ExtensionContext>,
    g: Vec<RingElem>,
    t: usize,
}

impl SplitRing {
    fn new(ctx: Arc<ExtensionContext>, t: u32) -> Result<Self> {
        // scan monic candidates in lex order over residue representatives
        let reps: Vec<RingElem> = ctx.residue_elements(Level::R).collect();
        let mut idx = vec![0usize; t as usize];
        loop {
            let mut cand: Vec<RingElem> = idx.iter().map(|&i| reps[i].clone()).collect();
            cand.push(ctx.one(Level::R));
            match fq_is_irreducible(&ctx, &cand, t) {
                None => {
                    return Err(Error::ContextTooLarge(format!(
                        "splitting ring of degree {t} over q = {} is out of range",
                        ctx.q()
                    )))
                }
                Some(true) => {
                    return Ok(SplitRing {
                        ctx,
                        g: cand,
                        t: t as usize,
                    });
                }
                Some(false) => {}
            }
            let mut i = idx.len();
            loop {
                assert!(
                    i > 0,
                    "irreducible polynomials of every degree exist over F_q"
                );
                i -= 1;
                idx[i] += 1;
                if idx[i] < reps.len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    fn zero(&self) -> Vec<RingElem> {
        vec![self.ctx.zero(Level::R); self.t]
    }

    fn one(&self) -> Vec<RingElem> {
        let mut v = self.zero();
        v[0] = self.ctx.one(Level::R);
        v
    }

    fn mul(&self, a: &[RingElem], b: &[RingElem]) -> Vec<RingElem> {
        let ctx = &self.ctx;
        if self.t == 1 {
            return vec![ctx.mul(&a[0], &b[0]).unwrap()];
        }
        let mut t = vec![ctx.zero(Level::R); 2 * self.t - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let s = ctx.mul(x, y).unwrap();
                t[i + j] = ctx.add(&t[i + j], &s).unwrap();
            }
        }
        for k in (self.t..2 * self.t - 1).rev() {
            let c = t[k].clone();
            if c.is_zero() {
                continue;
            }
            t[k] = ctx.zero(Level::R);
            for i in 0..self.t {
                let s = ctx.mul(&c, &self.g[i]).unwrap();
                t[k - self.t + i] = ctx.sub(&t[k - self.t + i], &s).unwrap();
            }
        }
        t.truncate(self.t);
        t
    }

    fn add(&self, a: &[RingElem], b: &[RingElem]) -> Vec<RingElem> {
        a.iter()
            .zip(b)
            .map(|(x, y)| self.ctx.add(x, y).unwrap())
            .collect()
    }

    fn sub(&self, a: &[RingElem], b: &[RingElem]) -> Vec<RingElem> {
        a.iter()
            .zip(b)
            .map(|(x, y)| self.ctx.sub(x, y).unwrap())
            .collect()
    }

    fn pow(&self, a: &[RingElem], mut k: u128) -> Vec<RingElem> {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    fn is_one(&self, a: &[RingElem]) -> bool {
        a[0] == self.ctx.one(Level::R) && a[1..].iter().all(RingElem::is_zero)
    }

    /// Teichmüller lift in `E`: iterate `z ↦ z^{q^t}`.
    fn teich(&self, a: &[RingElem], qt: u128) -> Vec<RingElem> {
        let mut z = a.to_vec();
        for _ in 0..=self.ctx.e() {
            let next = self.pow(&z, qt);
            if next == z {
                break;
            }
            z = next;
        }
        z
    }
}

/// The factorization of `x^n - 1` over `R` plus everything derived from it:
/// coset structure, the reciprocal permutation, and the divisor lattice.
pub struct FactorBasis {
    ctx: Arc<ExtensionContext>,
    n: usize,
    factors: Vec<RPoly>,
    cosets: Vec<Vec<usize>>,
    recip_map: Vec<usize>,
    xn1: RPoly,
}

impl std::fmt::Debug for FactorBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "FactorBasis(n={}, {} factors over {:?})",
            self.n,
            self.factors.len(),
            self.ctx
        )
    }
}

/// Monic divisor of `x^n - 1`, identified by its set of irreducible factors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Divisor {
    pub mask: u32,
    pub poly: RPoly,
}

/// Common-factor decomposition of a divisor pair: `f = w f₁`, `g = w g₁`
/// with `w = gcd(f, g)`, and `ℓ` the product of the factors dividing
/// neither.
#[derive(Clone, Debug)]
pub struct DivisorSplit {
    pub w: Divisor,
    pub f1: Divisor,
    pub g1: Divisor,
    pub ell: Divisor,
}

/// Factor `x^n - 1` over `R` into monic basic irreducibles, one per
/// `q`-cyclotomic coset.
pub fn factor_xn1(ctx: &Arc<ExtensionContext>, n: usize) -> Result<Arc<FactorBasis>> {
    if n == 0 {
        return Err(Error::InvalidParameter("length must be positive".into()));
    }
    if (n as u64).is_multiple_of(ctx.p()) {
        return Err(Error::LengthNotCoprime { n, p: ctx.p() });
    }
    let cosets = cyclotomic_cosets(n, ctx.q());
    if cosets.len() > 32 {
        return Err(Error::ContextTooLarge(format!(
            "{} irreducible factors exceed the 32-bit divisor lattice",
            cosets.len()
        )));
    }

    // multiplicative order of q mod n = degree of the splitting ring
    let t = {
        let qn = ctx.q() % n as u64;
        let mut acc = qn % n as u64;
        let mut t = 1u32;
        while acc != 1 % n as u64 {
            acc = acc * qn % n as u64;
            t += 1;
        }
        t
    };
    let e = SplitRing::new(ctx.clone(), t)?;
    let qt = (ctx.q() as u128).checked_pow(t).ok_or_else(|| {
        Error::ContextTooLarge(format!("splitting ring order q^{t} exceeds 128 bits"))
    })?;
    debug_assert_eq!((qt - 1) % n as u128, 0);

    // root of unity of exact order n: scan residue candidates in canonical
    // order, lift to Teichmüller, and project onto the order-n part
    let n_primes = prime_factors(n as u128);
    let omega = {
        let reps: Vec<RingElem> = ctx.residue_elements(Level::R).collect();
        let mut idx = vec![0usize; e.t];
        'scan: loop {
            let cand: Vec<RingElem> = idx.iter().map(|&i| reps[i].clone()).collect();
            if !cand.iter().all(RingElem::is_zero) {
                let z = e.teich(&cand, qt);
                let w = e.pow(&z, (qt - 1) / n as u128);
                if e.is_one(&e.pow(&w, n as u128))
                    && n_primes
                        .iter()
                        .all(|&ell| !e.is_one(&e.pow(&w, n as u128 / ell)))
                {
                    break 'scan w;
                }
            }
            let mut i = idx.len();
            loop {
                assert!(
                    i > 0,
                    "the Teichmüller group of E contains an order-n element"
                );
                i -= 1;
                idx[i] += 1;
                if idx[i] < reps.len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    };

    // factor for a coset C: prod_{i in C} (x - ω^i), coefficients in R
    let mut factors = Vec::with_capacity(cosets.len());
    for coset in &cosets {
        let mut poly: Vec<Vec<RingElem>> = vec![e.one()];
        for &i in coset {
            let root = e.pow(&omega, i as u128);
            let mut next: Vec<Vec<RingElem>> = vec![e.zero(); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] = e.add(&next[k + 1], c);
                let t = e.mul(c, &root);
                next[k] = e.sub(&next[k], &t);
            }
            poly = next;
        }
        let mut coeffs = Vec::with_capacity(poly.len());
        for c in &poly {
            assert!(
                c[1..].iter().all(RingElem::is_zero),
                "Frobenius-stable cosets give coefficients in R"
            );
            coeffs.push(c[0].clone());
        }
        factors.push(RPoly::from_coeffs(Level::R, coeffs)?);
    }

    // sanity: the factors multiply back to x^n - 1
    let xn1 = RPoly::xn_minus_1(ctx, n);
    let mut prod = RPoly::one(ctx, Level::R);
    for f in &factors {
        prod = prod.mul(ctx, f)?;
    }
    assert_eq!(prod, xn1, "factor product must reproduce x^n - 1");

    // reciprocal permutation: coset C goes to -C mod n
    let coset_index: std::collections::HashMap<usize, usize> = cosets
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| c.iter().map(move |&i| (i, ci)))
        .collect();
    let recip_map: Vec<usize> = cosets
        .iter()
        .map(|c| coset_index[&((n - c[0] % n) % n)])
        .collect();
    for (i, &j) in recip_map.iter().enumerate() {
        debug_assert_eq!(
            factors[i].monic_reciprocal(ctx).unwrap(),
            factors[j],
            "reciprocal factor must be the factor of the negated coset"
        );
    }

    Ok(Arc::new(FactorBasis {
        ctx: ctx.clone(),
        n,
        factors,
        cosets,
        recip_map,
        xn1,
    }))
}

impl FactorBasis {
    pub fn context(&self) -> &Arc<ExtensionContext> {
        &self.ctx
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[RPoly] {
        &self.factors
    }

    pub fn cosets(&self) -> &[Vec<usize>] {
        &self.cosets
    }

    pub fn recip_map(&self) -> &[usize] {
        &self.recip_map
    }

    pub fn xn1(&self) -> &RPoly {
        &self.xn1
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn full_mask(&self) -> u32 {
        if self.factors.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.factors.len()) - 1
        }
    }

    /// The monic divisor with exactly the masked factors.
    pub fn divisor(&self, mask: u32) -> Result<Divisor> {
        if mask & !self.full_mask() != 0 {
            return Err(Error::NotADivisor);
        }
        let mut poly = RPoly::one(&self.ctx, Level::R);
        for (i, f) in self.factors.iter().enumerate() {
            if mask >> i & 1 == 1 {
                poly = poly.mul(&self.ctx, f)?;
            }
        }
        Ok(Divisor { mask, poly })
    }

    /// Recognize a monic divisor of `x^n - 1` by dividing out factors.
    pub fn divisor_from_poly(&self, p: &RPoly) -> Result<Divisor> {
        if !p.is_monic(&self.ctx) {
            return Err(Error::NotADivisor);
        }
        let mut rem = p.clone();
        let mut mask = 0u32;
        for (i, f) in self.factors.iter().enumerate() {
            if f.divides(&self.ctx, &rem)? {
                let (q, r) = rem.divmod_monic(&self.ctx, f)?;
                debug_assert!(r.is_zero());
                rem = q;
                mask |= 1 << i;
            }
        }
        if rem != RPoly::one(&self.ctx, Level::R) {
            return Err(Error::NotADivisor);
        }
        Ok(Divisor {
            mask,
            poly: p.clone(),
        })
    }

    pub fn gcd(&self, a: &Divisor, b: &Divisor) -> Divisor {
        self.divisor(a.mask & b.mask).unwrap()
    }

    /// Degree of the divisor with the masked factors, without building it.
    pub fn mask_degree(&self, mask: u32) -> usize {
        self.factors
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, f)| f.degree().unwrap())
            .sum()
    }

    pub fn lcm(&self, a: &Divisor, b: &Divisor) -> Divisor {
        self.divisor(a.mask | b.mask).unwrap()
    }

    /// `(x^n - 1) / d`: the divisor on the complementary factor set.
    pub fn complement(&self, d: &Divisor) -> Divisor {
        self.divisor(self.full_mask() & !d.mask).unwrap()
    }

    /// Mask of the monic reciprocal `d*`: factors move to negated cosets.
    pub fn reciprocal_mask(&self, mask: u32) -> u32 {
        let mut out = 0u32;
        for (i, &j) in self.recip_map.iter().enumerate() {
            if mask >> i & 1 == 1 {
                out |= 1 << j;
            }
        }
        out
    }

    pub fn reciprocal_divisor(&self, d: &Divisor) -> Divisor {
        let rd = self.divisor(self.reciprocal_mask(d.mask)).unwrap();
        debug_assert_eq!(rd.poly, d.poly.monic_reciprocal(&self.ctx).unwrap());
        rd
    }

    /// Split a pair into common part `w`, private parts `f₁`, `g₁`, and the
    /// complement `ℓ` of everything involved.
    pub fn divisor_split(&self, f: &Divisor, g: &Divisor) -> DivisorSplit {
        let w = self.divisor(f.mask & g.mask).unwrap();
        let f1 = self.divisor(f.mask & !g.mask).unwrap();
        let g1 = self.divisor(g.mask & !f.mask).unwrap();
        let ell = self.divisor(self.full_mask() & !(f.mask | g.mask)).unwrap();
        DivisorSplit { w, f1, g1, ell }
    }

    /// All `2^s` divisor masks, ascending.
    pub fn all_masks(&self) -> impl Iterator<Item = u32> {
        0..=self.full_mask()
    }
}

impl RPoly {
    /// Quotient and remainder over the residue field: both inputs are
    /// reduced mod p, the divisor only needs a nonzero residue lead.
    /// Test-support for residue-side cross-checks.
    pub fn divmod_residue(&self, ctx: &ExtensionContext, d: &RPoly) -> (RPoly, RPoly) {
        let a = self.to_residue(ctx);
        let b = d.to_residue(ctx);
        let lead = b.leading().expect("residue divisor must be nonzero");
        let inv = ctx.residue_reduce(&ctx.inv(lead).expect("unit residue lead"));
        let monic = b.scale(ctx, &inv).unwrap().to_residue(ctx);
        let (q, r) = a.divmod_monic(ctx, &monic).unwrap();
        let q = q.scale(ctx, &inv).unwrap().to_residue(ctx);
        let r = r.to_residue(ctx);
        (q, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx() -> Arc<ExtensionContext> {
        ExtensionContext::new(3, 2, 1).unwrap()
    }

    fn poly(ctx: &ExtensionContext, coeffs: &[u64]) -> RPoly {
        RPoly::from_base_coeffs(ctx, coeffs)
    }

    #[test]
    fn divmod_round_trips_on_random_inputs() {
        let ctx = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a: Vec<u64> = (0..6).map(|_| rng.next_u64() % 9).collect();
            let mut d: Vec<u64> = (0..3).map(|_| rng.next_u64() % 9).collect();
            d.push(1); // monic cubic
            let a = poly(&ctx, &a);
            let d = poly(&ctx, &d);
            let (q, r) = a.divmod_monic(&ctx, &d).unwrap();
            assert!(r.degree().is_none_or(|dr| dr < 3));
            let back = q.mul(&ctx, &d).unwrap().add(&ctx, &r).unwrap();
            assert_eq!(back, a);
        }
        // non-monic divisors are refused
        let a = poly(&ctx, &[1, 1]);
        let d = poly(&ctx, &[1, 2]);
        assert_eq!(
            a.divmod_monic(&ctx, &d).unwrap_err(),
            Error::NonMonicDivisor
        );
    }

    #[test]
    fn reciprocal_reverses_coefficients() {
        let ctx = ctx();
        // (x^2 + x + 3)* = 3x^2 + x + 1
        let f = poly(&ctx, &[3, 1, 1]);
        assert_eq!(f.reciprocal().unwrap(), poly(&ctx, &[1, 1, 3]));
        assert_eq!(f.reciprocal().unwrap().pretty(), "3x^2+x+1");
        // monic reciprocal is an involution on divisors of x^n - 1
        let g = poly(&ctx, &[8, 4, 1]); // x^2+4x+8, a factor of x^8-1
        let gr = g.monic_reciprocal(&ctx).unwrap();
        assert!(gr.is_monic(&ctx));
        assert_eq!(gr.monic_reciprocal(&ctx).unwrap(), g);
        // x + 8 = x - 1 is self-reciprocal
        let s = poly(&ctx, &[8, 1]);
        assert_eq!(s.monic_reciprocal(&ctx).unwrap(), s);
        assert_eq!(
            RPoly::zero(Level::R).reciprocal().unwrap_err(),
            Error::ZeroPolynomial
        );
    }

    #[test]
    fn pretty_printing_uses_descending_powers() {
        let ctx = ctx();
        assert_eq!(poly(&ctx, &[8, 4, 1]).pretty(), "x^2+4x+8");
        assert_eq!(poly(&ctx, &[1, 0, 0, 3]).pretty(), "3x^3+1");
        assert_eq!(poly(&ctx, &[0, 1]).pretty(), "x");
        assert_eq!(RPoly::zero(Level::R).pretty(), "0");
    }

    #[test]
    fn cosets_mod_8_over_q3() {
        assert_eq!(
            cyclotomic_cosets(8, 3),
            vec![vec![0], vec![1, 3], vec![2, 6], vec![4], vec![5, 7]]
        );
        assert_eq!(cyclotomic_cosets(4, 3), vec![vec![0], vec![1, 3], vec![2]]);
        assert_eq!(cyclotomic_cosets(5, 3), vec![vec![0], vec![1, 2, 3, 4]]);
        assert_eq!(cyclotomic_cosets(1, 3), vec![vec![0]]);
    }

    #[test]
    fn x8_minus_1_factors_over_z9() {
        let ctx = ctx();
        let fb = factor_xn1(&ctx, 8).unwrap();
        let mut got: Vec<RPoly> = fb.factors().to_vec();
        got.sort_by_key(|f| (f.degree(), f.pretty()));
        let mut want = vec![
            poly(&ctx, &[8, 1]),    // x + 8
            poly(&ctx, &[1, 1]),    // x + 1
            poly(&ctx, &[1, 0, 1]), // x^2 + 1
            poly(&ctx, &[8, 4, 1]), // x^2 + 4x + 8
            poly(&ctx, &[8, 5, 1]), // x^2 + 5x + 8
        ];
        want.sort_by_key(|f| (f.degree(), f.pretty()));
        assert_eq!(got, want);
        // and their residues over F_3
        let mut res: Vec<String> = fb
            .factors()
            .iter()
            .map(|f| f.to_residue(&ctx).pretty())
            .collect();
        res.sort();
        let mut want_res = vec!["x+2", "x+1", "x^2+1", "x^2+x+2", "x^2+2x+2"];
        want_res.sort_unstable();
        assert_eq!(res, want_res);
        // reciprocal permutation: cosets {0}, {2,6}, {4} are self-inverse,
        // {1,3} and {5,7} swap
        assert_eq!(fb.recip_map(), &[0, 4, 2, 3, 1]);
    }

    #[test]
    fn small_lengths_factor_as_expected() {
        let ctx = ctx();
        let fb2 = factor_xn1(&ctx, 2).unwrap();
        assert_eq!(fb2.factors(), &[poly(&ctx, &[8, 1]), poly(&ctx, &[1, 1])]);
        let fb4 = factor_xn1(&ctx, 4).unwrap();
        assert_eq!(
            fb4.factors(),
            &[
                poly(&ctx, &[8, 1]),
                poly(&ctx, &[1, 0, 1]),
                poly(&ctx, &[1, 1])
            ]
        );
        let fb5 = factor_xn1(&ctx, 5).unwrap();
        assert_eq!(fb5.factors()[0], poly(&ctx, &[8, 1]));
        assert_eq!(fb5.factors()[1], poly(&ctx, &[1, 1, 1, 1, 1]));
        let fb7 = factor_xn1(&ctx, 7).unwrap();
        assert_eq!(fb7.factors()[1], poly(&ctx, &[1, 1, 1, 1, 1, 1, 1]));
        // multiples of p are rejected
        assert_eq!(
            factor_xn1(&ctx, 6).unwrap_err(),
            Error::LengthNotCoprime { n: 6, p: 3 }
        );
    }

    /// Independent check: lift the brute-force residue factorization with
    /// linear Hensel steps and compare factor sets.
    #[test]
    fn factors_agree_with_hensel_lifting() {
        let ctx = ctx();
        for n in [2usize, 4, 5, 7, 8] {
            let fb = factor_xn1(&ctx, n).unwrap();
            let mut lifted = hensel_factors(&ctx, n);
            let mut got = fb.factors().to_vec();
            lifted.sort_by_key(RPoly::pretty);
            got.sort_by_key(RPoly::pretty);
            assert_eq!(got, lifted, "n = {n}");
        }
    }

    /// Brute-force irreducible factors of x^n - 1 over F_3, Hensel-lifted to
    /// Z_9 one linear step at a time. Completely separate code path from the
    /// splitting-ring construction.
    fn hensel_factors(ctx: &Arc<ExtensionContext>, n: usize) -> Vec<RPoly> {
        // residue factorization by scanning monic divisors degree-ascending
        let mut rem = RPoly::xn_minus_1(ctx, n).to_residue(ctx);
        let mut res_factors = Vec::new();
        let mut deg = 1usize;
        while rem.degree() != Some(0) {
            let mut found = false;
            let mut digits = vec![0u64; deg];
            'cand: loop {
                let mut c: Vec<u64> = digits.clone();
                c.push(1);
                let cand = RPoly::from_base_coeffs(ctx, &c);
                let (q, r) = rem.divmod_residue(ctx, &cand);
                if r.is_zero() {
                    res_factors.push(cand);
                    rem = q;
                    found = true;
                    break 'cand;
                }
                let mut i = deg;
                loop {
                    if i == 0 {
                        break 'cand;
                    }
                    i -= 1;
                    digits[i] += 1;
                    if digits[i] < 3 {
                        break;
                    }
                    digits[i] = 0;
                }
            }
            if !found {
                deg += 1;
            }
        }
        // scanning degree-ascending and dividing out yields irreducibles

        // lift each factor against its cofactor by one linear Hensel step
        // (e = 2, so a single step suffices)
        let target = RPoly::xn_minus_1(ctx, n);
        res_factors
            .iter()
            .map(|fbar| {
                let mut cof = target.to_residue(ctx);
                let (q, r) = cof.divmod_residue(ctx, fbar);
                assert!(r.is_zero());
                cof = q;
                // Bezout a·f + b·cof = 1 over F_3
                let (a, b) = bezout_residue(ctx, fbar, &cof);
                let check = a
                    .mul(ctx, fbar)
                    .unwrap()
                    .add(ctx, &b.mul(ctx, &cof).unwrap())
                    .unwrap()
                    .to_residue(ctx);
                assert_eq!(check, RPoly::one(ctx, Level::R));
                // f1 = f + p * (b·d mod f) with d = (target - f·cof)/p
                let prod = fbar.mul(ctx, &cof).unwrap();
                let diff = target.sub(ctx, &prod).unwrap();
                let d = RPoly::from_coeffs(
                    Level::R,
                    diff.coeffs().iter().map(|c| ctx.quo_pv(c, 1)).collect(),
                )
                .unwrap();
                let (_, corr) = b.mul(ctx, &d).unwrap().divmod_residue(ctx, fbar);
                let step = corr.scale(ctx, &ctx.r_from_base(3)).unwrap();
                fbar.add(ctx, &step).unwrap()
            })
            .collect()
    }

    /// Extended Euclid over the residue field; returns (a, b) with
    /// a·f + b·g = 1.
    fn bezout_residue(ctx: &ExtensionContext, f: &RPoly, g: &RPoly) -> (RPoly, RPoly) {
        let mut r0 = f.to_residue(ctx);
        let mut r1 = g.to_residue(ctx);
        let (mut a0, mut a1) = (RPoly::one(ctx, Level::R), RPoly::zero(Level::R));
        let (mut b0, mut b1) = (RPoly::zero(Level::R), RPoly::one(ctx, Level::R));
        while !r1.is_zero() {
            let (q, r) = r0.divmod_residue(ctx, &r1);
            let na = a0
                .sub(ctx, &q.mul(ctx, &a1).unwrap())
                .unwrap()
                .to_residue(ctx);
            let nb = b0
                .sub(ctx, &q.mul(ctx, &b1).unwrap())
                .unwrap()
                .to_residue(ctx);
            r0 = r1;
            r1 = r;
            a0 = a1;
            a1 = na;
            b0 = b1;
            b1 = nb;
        }
        // normalize the unit gcd to 1
        let lead = r0.leading().unwrap().clone();
        let inv = ctx.residue_reduce(&ctx.inv(&lead).unwrap());
        (
            a0.scale(ctx, &inv).unwrap().to_residue(ctx),
            b0.scale(ctx, &inv).unwrap().to_residue(ctx),
        )
    }

    #[test]
    fn divisor_lattice_on_x8_minus_1() {
        let ctx = ctx();
        let fb = factor_xn1(&ctx, 8).unwrap();
        assert_eq!(fb.full_mask(), 0b11111);
        // f = (x+8)(x+1), g = (x+8)(x^2+1)(x^2+4x+8) in coset order
        // {0},{1,3},{2,6},{4},{5,7} -> masks from factor positions
        let find = |p: &RPoly| fb.factors().iter().position(|f| f == p).unwrap();
        let i_xm1 = find(&poly(&ctx, &[8, 1]));
        let i_xp1 = find(&poly(&ctx, &[1, 1]));
        let i_x21 = find(&poly(&ctx, &[1, 0, 1]));
        let i_x248 = find(&poly(&ctx, &[8, 4, 1]));
        let i_x258 = find(&poly(&ctx, &[8, 5, 1]));
        let f = fb.divisor(1 << i_xm1 | 1 << i_xp1).unwrap();
        let g = fb.divisor(1 << i_xm1 | 1 << i_x21 | 1 << i_x248).unwrap();
        let split = fb.divisor_split(&f, &g);
        assert_eq!(split.w.poly, poly(&ctx, &[8, 1]));
        assert_eq!(split.f1.poly, poly(&ctx, &[1, 1]));
        assert_eq!(
            split.g1.poly,
            poly(&ctx, &[1, 0, 1])
                .mul(&ctx, &poly(&ctx, &[8, 4, 1]))
                .unwrap()
        );
        assert_eq!(split.ell.poly, poly(&ctx, &[8, 5, 1]));
        assert_eq!(1 << i_x258, split.ell.mask);
        // w·g1 frozen: x^5+3x^4+5x^3+4x^2+4x+1
        let wg1 = split.w.poly.mul(&ctx, &split.g1.poly).unwrap();
        assert_eq!(wg1, poly(&ctx, &[1, 4, 4, 5, 3, 1]));
        // round-trip through divisor_from_poly
        assert_eq!(fb.divisor_from_poly(&f.poly).unwrap().mask, f.mask);
        assert_eq!(fb.divisor_from_poly(&g.poly).unwrap().mask, g.mask);
        assert!(fb.divisor_from_poly(&poly(&ctx, &[1, 1, 1])).is_err());
        // complement, gcd, lcm respect polynomial arithmetic
        let comp = fb.complement(&f);
        let prod = f.poly.mul(&ctx, &comp.poly).unwrap();
        assert_eq!(prod, *fb.xn1());
        assert_eq!(fb.gcd(&f, &g).poly, split.w.poly);
        let lcm = fb.lcm(&f, &g);
        let fg = f.poly.mul(&ctx, &g.poly).unwrap();
        let wl = split.w.poly.mul(&ctx, &lcm.poly).unwrap();
        assert_eq!(fg, wl);
        // reciprocal divisor of (x+8)(x+1) is itself; of the {1,3} factor
        // it is the {5,7} factor
        assert_eq!(fb.reciprocal_divisor(&f).mask, f.mask);
        let d13 = fb.divisor(1 << i_x248).unwrap();
        assert_eq!(fb.reciprocal_divisor(&d13).mask, 1 << i_x258);
    }

    #[test]
    fn words_shift_reverse_and_pair() {
        let ctx = ctx();
        let n = 4;
        let w = |c: &[u64]| {
            CyclicWord::from_coeffs(Level::R, c.iter().map(|&v| ctx.r_from_base(v)).collect())
                .unwrap()
        };
        let u = w(&[1, 2, 3, 4]);
        assert_eq!(u.shift(1), w(&[4, 1, 2, 3]));
        assert_eq!(u.shift(4), u);
        assert_eq!(u.reversed(), w(&[4, 3, 2, 1]));
        // star is shift-invariant
        let v = w(&[5, 0, 7, 1]);
        let s0 = u.star(&ctx, &v).unwrap();
        let s1 = u.shift(1).star(&ctx, &v.shift(1)).unwrap();
        assert_eq!(s0, s1);
        // from_poly wraps mod x^n - 1
        let p = poly(&ctx, &[1, 0, 0, 0, 2]); // 2x^4 + 1 = 3 at x^4 = 1
        let pw = CyclicWord::from_poly(&ctx, n, &p);
        assert_eq!(pw, w(&[3, 0, 0, 0]));
        // trace pairing against the identity on S-words
        let a = w(&[1, 0, 0, 0]);
        let b = w(&[0, 2, 0, 0]);
        let s = CyclicWord::from_parts(&ctx, &a, &b).unwrap();
        let t = CyclicWord::from_parts(&ctx, &w(&[1, 1, 0, 0]), &w(&[0, 0, 0, 0])).unwrap();
        // s ⋆ t = (1 + μ·0) + (0 + μ2)·1 = 1 + 2μ; Tr = 2
        assert_eq!(s.circledast(&ctx, &t).unwrap(), ctx.r_from_base(2));
        // flatten / unflatten round trip
        let flat = s.flatten(&ctx).unwrap();
        assert_eq!(flat.len(), 8);
        assert_eq!(CyclicWord::unflatten(&ctx, &flat).unwrap(), s);
    }

    #[test]
    fn factorization_works_for_m_greater_than_one() {
        // R = GR(9, 2): q = 9, so x^8 - 1 splits into linear factors
        let ctx = ExtensionContext::new(3, 2, 2).unwrap();
        let fb = factor_xn1(&ctx, 8).unwrap();
        assert_eq!(fb.factor_count(), 8);
        assert!(fb.factors().iter().all(|f| f.degree() == Some(1)));
        let mut prod = RPoly::one(&ctx, Level::R);
        for f in fb.factors() {
            prod = prod.mul(&ctx, f).unwrap();
        }
        assert_eq!(prod, *fb.xn1());
        // n = 5 needs a genuine splitting extension: ord_5(9) = 2
        let fb5 = factor_xn1(&ctx, 5).unwrap();
        assert_eq!(fb5.factor_count(), 3);
        let degs: Vec<_> = fb5.factors().iter().map(|f| f.degree().unwrap()).collect();
        assert_eq!(degs, vec![1, 2, 2]);
    }
}
