//! Arithmetic in the chain-ring tower `Z_{p^e} ⊆ R ⊆ S`.
//!
//! `R = GR(p^e, m)` is the degree-`m` Galois ring over `Z_{p^e}` and
//! `S = R[z]/(z^2 - θ)` is its quadratic unramified extension, so
//! `S = GR(p^e, 2m)`. Throughout, `p` is an odd prime, `e ≥ 1` is the
//! nilpotency index of the maximal ideal `(p)`, and `q = p^m` is the size of
//! the residue field `R/(p)`.
//!
//! Every context is built deterministically from `(p, e, m)` alone:
//!
//! * the modulus `h` of `R` is the Teichmüller-corrected lift of the
//!   lexicographically smallest primitive polynomial of degree `m` over
//!   `F_p`, so `h` divides `x^q - x` and the class of `y` is itself a
//!   Teichmüller element;
//! * `θ` is the Teichmüller lift of the smallest quadratic non-residue of
//!   `F_q`, which makes `z^2 - θ` basic irreducible;
//! * `μ = z` satisfies `μ^2 = θ`, `Tr(μ) = 0`, and `S = R ⊕ μR`;
//! * `ξ` is the Teichmüller lift of the smallest element of `S` whose residue
//!   generates `F_{q^2}^*`, and `ζ = ξ^{q+1}` lands in `R`.
//!
//! The generalized Frobenius is `φ(a + μb) = a - μb` (the unique nontrivial
//! `R`-automorphism of `S`), and the trace is `Tr(s) = s + φ(s) = 2a`.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Position of an element inside the tower.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Level {
    /// The base chain ring `Z_{p^e}`.
    Base,
    /// The Galois ring `R = GR(p^e, m)`.
    R,
    /// The quadratic extension `S = R[z]/(z^2 - θ)`.
    S,
}

/// An element at some level of the tower.
///
/// The coefficient sequence is over `Z_{p^e}`: one residue at level `Base`,
/// `m` coefficients (ascending powers of `y`) at level `R`, and `2m`
/// coefficients at level `S` storing `a + μb` as `a`-part then `b`-part.
/// Derived `Ord` is the canonical element ordering used everywhere:
/// lexicographic on the coefficient sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RingElem {
    level: Level,
    coeffs: Vec<u64>,
}

impl RingElem {
    #[inline]
    pub fn level(&self) -> Level {
        self.level
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

// ---- flat arithmetic mod p^e ----

#[inline]
fn zp_add(pe: u64, a: u64, b: u64) -> u64 {
    (a + b) % pe
}

#[inline]
fn zp_sub(pe: u64, a: u64, b: u64) -> u64 {
    (a + pe - b) % pe
}

#[inline]
fn zp_mul(pe: u64, a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % pe as u128) as u64
}

fn zp_val(p: u64, e: u32, mut a: u64) -> u32 {
    if a == 0 {
        return e;
    }
    let mut v = 0;
    while a.is_multiple_of(p) {
        a /= p;
        v += 1;
    }
    v
}

// ---- vectors over Z_{p^e} reduced by a monic modulus ----
//
// These free functions carry the whole of R's arithmetic; the context methods
// are thin wrappers. Keeping them modulus-parameterized lets the constructor
// compute in a provisional ring before the final modulus exists.

fn rv_add(pe: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| zp_add(pe, x, y)).collect()
}

fn rv_sub(pe: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(&x, &y)| zp_sub(pe, x, y)).collect()
}

fn rv_neg(pe: u64, a: &[u64]) -> Vec<u64> {
    a.iter().map(|&x| zp_sub(pe, 0, x)).collect()
}

fn rv_scale(pe: u64, c: u64, a: &[u64]) -> Vec<u64> {
    a.iter().map(|&x| zp_mul(pe, c, x)).collect()
}

impl ExtensionContext {
    /// `p^v` for `v ≤ e`.
    pub(crate) fn pv(&self, v: u32) -> u64 {
        self.p.pow(v)
    }

    /// Coefficient-wise integer quotient by `p^v`. When `valuation(x) ≥ v`
    /// this is the exact cofactor `x / p^v`; in general the remainder has
    /// coefficients below `p^v`, which is the canonical residue used to
    /// reduce entries above a pivot.
    pub(crate) fn quo_pv(&self, x: &RingElem, v: u32) -> RingElem {
        let pv = self.pv(v);
        RingElem {
            level: x.level,
            coeffs: x.coeffs.iter().map(|&c| c / pv).collect(),
        }
    }

    /// Multiply every coefficient by the base scalar `c`.
    pub(crate) fn base_scale(&self, c: u64, x: &RingElem) -> RingElem {
        RingElem {
            level: x.level,
            coeffs: rv_scale(self.pe, c, &x.coeffs),
        }
    }
}

/// Schoolbook product reduced by the monic modulus `h` (ascending, len m+1).
fn rv_mul(pe: u64, h: &[u64], a: &[u64], b: &[u64]) -> Vec<u64> {
    let m = h.len() - 1;
    debug_assert!(a.len() == m && b.len() == m);
    if m == 1 {
        return vec![zp_mul(pe, a[0], b[0])];
    }
    let mut t = vec![0u64; 2 * m - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            t[i + j] = zp_add(pe, t[i + j], zp_mul(pe, x, y));
        }
    }
    // x^k ≡ -(h_0 + h_1 x + ... ) x^{k-m} for k ≥ m, h monic
    for k in (m..2 * m - 1).rev() {
        let c = t[k];
        if c == 0 {
            continue;
        }
        t[k] = 0;
        for i in 0..m {
            t[k - m + i] = zp_sub(pe, t[k - m + i], zp_mul(pe, c, h[i]));
        }
    }
    t.truncate(m);
    t
}

fn rv_pow(pe: u64, h: &[u64], a: &[u64], mut k: u128) -> Vec<u64> {
    let m = h.len() - 1;
    let mut acc = vec![0u64; m];
    acc[0] = 1 % pe;
    let mut base = a.to_vec();
    while k > 0 {
        if k & 1 == 1 {
            acc = rv_mul(pe, h, &acc, &base);
        }
        base = rv_mul(pe, h, &base, &base);
        k >>= 1;
    }
    acc
}

fn rv_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Teichmüller lift inside the ring (pe, h): iterate `t ↦ t^q` to the unique
/// fixed point congruent to the input mod p. Convergence is quadratic in the
/// p-adic sense, so `e` iterations always suffice.
fn rv_teich(pe: u64, e: u32, h: &[u64], q: u64, a: &[u64]) -> Vec<u64> {
    let mut t = a.to_vec();
    for _ in 0..=e {
        let next = rv_pow(pe, h, &t, q as u128);
        if next == t {
            break;
        }
        t = next;
    }
    debug_assert_eq!(rv_pow(pe, h, &t, q as u128), t);
    t
}

// ---- polynomials over F_p (u64 coefficients), used only to pick moduli ----

fn fpp_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fpp_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    // remainder of a by b, b nonzero with unit (nonzero) leading coefficient
    let mut r = a.to_vec();
    fpp_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inverse_prime(p, b[db]);
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = (r[r.len() - 1] as u128 * lead_inv as u128 % p as u128) as u64;
        for i in 0..=db {
            let t = (c as u128 * b[i] as u128 % p as u128) as u64;
            r[k + i] = (r[k + i] + p - t) % p;
        }
        fpp_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn fpp_mulmod(p: u64, md: &[u64], a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut t = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            t[i + j] = (t[i + j] + x * y) % p;
        }
    }
    fpp_trim(&mut t);
    if t.is_empty() {
        return t;
    }
    fpp_rem(p, &t, md)
}

fn fpp_powmod(p: u64, md: &[u64], a: &[u64], mut k: u128) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = fpp_rem(p, a, md);
    while k > 0 {
        if k & 1 == 1 {
            acc = fpp_mulmod(p, md, &acc, &base);
        }
        base = fpp_mulmod(p, md, &base, &base);
        k >>= 1;
    }
    acc
}

fn fpp_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    fpp_trim(&mut x);
    fpp_trim(&mut y);
    while !y.is_empty() {
        let r = fpp_rem(p, &x, &y);
        x = y;
        y = r;
    }
    x
}

fn mod_inverse_prime(p: u64, a: u64) -> u64 {
    // Fermat; p prime, a nonzero mod p
    let mut acc: u128 = 1;
    let mut base = (a % p) as u128;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        k >>= 1;
    }
    acc as u64
}

/// Distinct prime factors by trial division; inputs stay well under 2^64.
pub(crate) fn prime_factors(mut x: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.push(d);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `y^{p^m} ≡ y (mod h̄)` plus coprimality at every maximal proper subfield.
fn fpp_is_irreducible(p: u64, md: &[u64], m: u32) -> bool {
    let x = vec![0u64, 1];
    let qfull = (p as u128).pow(m);
    let xq = fpp_powmod(p, md, &x, qfull);
    let mut diff = xq.clone();
    diff.resize(diff.len().max(2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    fpp_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    for ell in prime_factors(m as u128) {
        let sub = (p as u128).pow((m as u128 / ell) as u32);
        let xs = fpp_powmod(p, md, &x, sub);
        let mut d = xs.clone();
        d.resize(d.len().max(2), 0);
        d[1] = (d[1] + p - 1) % p;
        fpp_trim(&mut d);
        let g = fpp_gcd(p, &d, md);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest monic primitive polynomial of degree `m` over
/// `F_p`: irreducible, and the class of `y` generates the unit group.
fn fp_smallest_primitive(p: u64, m: u32) -> Vec<u64> {
    let md = m as usize;
    let qm1 = (p as u128).pow(m) - 1;
    let ells = prime_factors(qm1);
    let mut digits = vec![0u64; md];
    loop {
        // monic candidate with ascending coefficients `digits`
        if digits[0] != 0 {
            // constant term must be nonzero for y to be a unit
            let mut cand = digits.clone();
            cand.push(1);
            if fpp_is_irreducible(p, &cand, m) {
                let y = vec![0u64, 1];
                let primitive = ells.iter().all(|&ell| {
                    let t = fpp_powmod(p, &cand, &y, qm1 / ell);
                    t != vec![1u64]
                });
                if primitive {
                    return cand;
                }
            }
        }
        // odometer, last digit fastest: walks candidates in lex order
        let mut i = md;
        loop {
            if i == 0 {
                unreachable!("primitive polynomials of every degree exist over F_p");
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
        }
    }
}

// ---- the context ----

/// Immutable description of one tower `Z_{p^e} ⊆ R ⊆ S`, with all derived
/// structure constants. Construction is deterministic in `(p, e, m)`.
pub struct ExtensionContext {
    p: u64,
    e: u32,
    m: u32,
    pe: u64,
    q: u64,
    h: Vec<u64>,
    theta: RingElem,
    mu: RingElem,
    xi: RingElem,
    zeta: RingElem,
    gamma: RingElem,
}

impl std::fmt::Debug for ExtensionContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ExtensionContext(p={}, e={}, m={})",
            self.p, self.e, self.m
        )
    }
}

impl PartialEq for ExtensionContext {
    fn eq(&self, other: &Self) -> bool {
        // construction is deterministic, so the parameters identify the tower
        self.p == other.p && self.e == other.e && self.m == other.m
    }
}
impl Eq for ExtensionContext {}

impl ExtensionContext {
    /// Build the tower for an odd prime `p`, nilpotency index `e ≥ 1`, and
    /// residue degree `m ≥ 1`.
    pub fn new(p: u64, e: u32, m: u32) -> Result<Arc<Self>> {
        if p < 3 || p.is_multiple_of(2) || !is_prime_u64(p) {
            return Err(Error::UnsupportedCharacteristic(p));
        }
        if e == 0 || m == 0 {
            return Err(Error::InvalidParameter("e and m must be at least 1".into()));
        }
        let pe = (p as u128).checked_pow(e).filter(|&v| v <= 1 << 31);
        let q = (p as u128).checked_pow(m).filter(|&v| v <= 1 << 31);
        let (pe, q) = match (pe, q) {
            (Some(pe), Some(q)) => (pe as u64, q as u64),
            _ => {
                return Err(Error::ContextTooLarge(format!(
                    "p^e and p^m must stay below 2^31 (p={p}, e={e}, m={m})"
                )))
            }
        };

        // modulus of R: Teichmüller-corrected lift of the smallest primitive
        // polynomial, so that h | x^q - x over Z_{p^e} and y^q = y in R
        let h: Vec<u64> = if m == 1 {
            vec![0, 1]
        } else {
            let hbar = fp_smallest_primitive(p, m);
            let h0: Vec<u64> = hbar.clone(); // naive lift: provisional GR(p^e, m)
            let y: Vec<u64> = {
                let mut v = vec![0u64; m as usize];
                v[1] = 1;
                v
            };
            let omega = rv_teich(pe, e, &h0, q, &y);
            // h = prod_{i<m} (x - omega^{p^i}), computed over the provisional ring
            let mut poly: Vec<Vec<u64>> = vec![vec![0; m as usize]; 1];
            poly[0][0] = 1;
            let mut root = omega;
            for i in 0..m {
                let neg = rv_neg(pe, &root);
                let mut next = vec![vec![0u64; m as usize]; poly.len() + 1];
                for (k, c) in poly.iter().enumerate() {
                    next[k + 1] = rv_add(pe, &next[k + 1], c);
                    next[k] = rv_add(pe, &next[k], &rv_mul(pe, &h0, c, &neg));
                }
                poly = next;
                if i + 1 < m {
                    root = rv_pow(pe, &h0, &root, p as u128);
                }
            }
            let mut out = Vec::with_capacity(m as usize + 1);
            for c in &poly {
                assert!(
                    c[1..].iter().all(|&v| v == 0),
                    "coefficients of the corrected modulus must descend to Z_{{p^e}}"
                );
                out.push(c[0]);
            }
            debug_assert_eq!(out[m as usize], 1);
            // the corrected modulus reduces to the primitive polynomial mod p
            debug_assert!(out.iter().zip(&hbar).all(|(&a, &b)| a % p == b));
            out
        };

        let mut ctx = ExtensionContext {
            p,
            e,
            m,
            pe,
            q,
            h,
            theta: RingElem {
                level: Level::R,
                coeffs: vec![0],
            },
            mu: RingElem {
                level: Level::S,
                coeffs: vec![0],
            },
            xi: RingElem {
                level: Level::S,
                coeffs: vec![0],
            },
            zeta: RingElem {
                level: Level::R,
                coeffs: vec![0],
            },
            gamma: RingElem {
                level: Level::R,
                coeffs: vec![0],
            },
        };

        // θ: Teichmüller lift of the smallest quadratic non-residue of F_q.
        // Residue candidates are exactly the vectors with coefficients < p.
        let theta = {
            let mut found = None;
            let mut digits = vec![0u64; m as usize];
            'scan: loop {
                if !rv_is_zero(&digits) {
                    let t = rv_pow(pe, &ctx.h, &digits, ((q - 1) / 2) as u128);
                    let is_one = t[0] % p == 1 && t[1..].iter().all(|&c| c % p == 0);
                    if !is_one {
                        found = Some(digits.clone());
                        break 'scan;
                    }
                }
                let mut i = m as usize;
                loop {
                    if i == 0 {
                        break 'scan;
                    }
                    i -= 1;
                    digits[i] += 1;
                    if digits[i] < p {
                        break;
                    }
                    digits[i] = 0;
                }
            }
            let nr = found.expect("half of F_q^* is non-square for odd q");
            RingElem {
                level: Level::R,
                coeffs: rv_teich(pe, e, &ctx.h, q, &nr),
            }
        };
        ctx.theta = theta;

        // μ = z in the {1, μ} presentation of S
        let mut mu_coeffs = vec![0u64; 2 * m as usize];
        mu_coeffs[m as usize] = 1;
        ctx.mu = RingElem {
            level: Level::S,
            coeffs: mu_coeffs,
        };

        // ξ: Teichmüller lift of the smallest element whose residue generates
        // F_{q^2}^*. Scanning reduced representatives (coefficients < p) in
        // lex order visits residues exactly in the canonical element order.
        let qq = q as u128 * q as u128;
        let ells = prime_factors(qq - 1);
        let xi = {
            let mut digits = vec![0u64; 2 * m as usize];
            loop {
                if !rv_is_zero(&digits) {
                    let cand = RingElem {
                        level: Level::S,
                        coeffs: digits.clone(),
                    };
                    let generates = ells.iter().all(|&ell| {
                        let t = ctx.pow_unchecked(&cand, (qq - 1) / ell);
                        !ctx.residue_is_one(&t)
                    });
                    if generates {
                        break ctx.teichmuller_lift(&cand);
                    }
                }
                let mut i = 2 * m as usize;
                loop {
                    assert!(i > 0, "F_{{q^2}}^* is cyclic, a generator exists");
                    i -= 1;
                    digits[i] += 1;
                    if digits[i] < p {
                        break;
                    }
                    digits[i] = 0;
                }
            }
        };
        ctx.xi = xi;

        // ζ = ξ^{q+1} has Teichmüller order q-1 and therefore lives in R
        let zeta_s = ctx.pow_unchecked(&ctx.xi, (q + 1) as u128);
        let (za, zb) = ctx.split_s(&zeta_s);
        assert!(
            rv_is_zero(&zb),
            "ξ^(q+1) must be Frobenius-fixed, hence in R"
        );
        ctx.zeta = RingElem {
            level: Level::R,
            coeffs: za,
        };

        ctx.gamma = RingElem {
            level: Level::R,
            coeffs: {
                let mut v = vec![0u64; m as usize];
                v[0] = p % pe;
                v
            },
        };

        Ok(Arc::new(ctx))
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }
    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }
    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }
    /// `p^e`, the size of the base ring.
    #[inline]
    pub fn pe(&self) -> u64 {
        self.pe
    }
    /// `q = p^m`, the size of the residue field of `R`.
    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Monic modulus of `R` over `Z_{p^e}`, ascending coefficients.
    pub fn modulus(&self) -> &[u64] {
        &self.h
    }
    /// `θ` with `μ^2 = θ`; the quadratic modulus of `S` is `z^2 - θ`.
    pub fn theta(&self) -> &RingElem {
        &self.theta
    }
    pub fn mu(&self) -> &RingElem {
        &self.mu
    }
    /// Teichmüller generator of `S`: multiplicative order exactly `q^2 - 1`.
    pub fn teichmuller_generator(&self) -> &RingElem {
        &self.xi
    }
    /// `ζ = ξ^{q+1} ∈ R`, of multiplicative order `q - 1`.
    pub fn zeta(&self) -> &RingElem {
        &self.zeta
    }
    /// Generator `p` of the maximal ideal of `R`.
    pub fn gamma(&self) -> &RingElem {
        &self.gamma
    }

    fn dim(&self, level: Level) -> usize {
        match level {
            Level::Base => 1,
            Level::R => self.m as usize,
            Level::S => 2 * self.m as usize,
        }
    }

    pub fn zero(&self, level: Level) -> RingElem {
        RingElem {
            level,
            coeffs: vec![0; self.dim(level)],
        }
    }

    pub fn one(&self, level: Level) -> RingElem {
        let mut coeffs = vec![0; self.dim(level)];
        coeffs[0] = 1 % self.pe;
        RingElem { level, coeffs }
    }

    /// Base-level element from an integer (reduced mod `p^e`).
    pub fn from_base(&self, v: u64) -> RingElem {
        RingElem {
            level: Level::Base,
            coeffs: vec![v % self.pe],
        }
    }

    /// Level-`R` element from ascending coefficients (reduced mod `p^e`).
    pub fn r_elem(&self, coeffs: &[u64]) -> Result<RingElem> {
        if coeffs.len() != self.m as usize {
            return Err(Error::InvalidParameter(format!(
                "level R expects {} coefficients, got {}",
                self.m,
                coeffs.len()
            )));
        }
        Ok(RingElem {
            level: Level::R,
            coeffs: coeffs.iter().map(|&c| c % self.pe).collect(),
        })
    }

    /// Convenience: the constant `v` at level `R`.
    pub fn r_from_base(&self, v: u64) -> RingElem {
        let mut coeffs = vec![0; self.m as usize];
        coeffs[0] = v % self.pe;
        RingElem {
            level: Level::R,
            coeffs,
        }
    }

    /// `a + μb` from its two level-`R` parts.
    pub fn s_elem(&self, a: &RingElem, b: &RingElem) -> Result<RingElem> {
        self.expect(Level::R, a)?;
        self.expect(Level::R, b)?;
        let mut coeffs = a.coeffs.clone();
        coeffs.extend_from_slice(&b.coeffs);
        Ok(RingElem {
            level: Level::S,
            coeffs,
        })
    }

    /// The pair `(a, b)` with `s = a + μb`; inverse of [`s_elem`].
    ///
    /// Closed forms `a = Tr(s)·2^{-1}` and `b = (s - φ(s))·(2μ)^{-1}` agree
    /// with this basis read-off; the tests pin that down.
    pub fn decompose(&self, s: &RingElem) -> Result<(RingElem, RingElem)> {
        self.expect(Level::S, s)?;
        let (a, b) = self.split_s(s);
        Ok((
            RingElem {
                level: Level::R,
                coeffs: a,
            },
            RingElem {
                level: Level::R,
                coeffs: b,
            },
        ))
    }

    fn split_s(&self, s: &RingElem) -> (Vec<u64>, Vec<u64>) {
        let m = self.m as usize;
        (s.coeffs[..m].to_vec(), s.coeffs[m..].to_vec())
    }

    /// Embed one level up: `Base → R` or `R → S`.
    pub fn promote(&self, x: &RingElem) -> Result<RingElem> {
        match x.level {
            Level::Base => Ok(self.r_from_base(x.coeffs[0])),
            Level::R => self.s_elem(x, &self.zero(Level::R)),
            Level::S => Err(Error::LevelMismatch {
                expected: Level::R,
                found: Level::S,
            }),
        }
    }

    fn expect(&self, level: Level, x: &RingElem) -> Result<()> {
        if x.level != level {
            return Err(Error::LevelMismatch {
                expected: level,
                found: x.level,
            });
        }
        debug_assert_eq!(x.coeffs.len(), self.dim(level));
        Ok(())
    }

    fn expect_same(&self, x: &RingElem, y: &RingElem) -> Result<Level> {
        if x.level != y.level {
            return Err(Error::LevelMismatch {
                expected: x.level,
                found: y.level,
            });
        }
        Ok(x.level)
    }

    pub fn add(&self, x: &RingElem, y: &RingElem) -> Result<RingElem> {
        let level = self.expect_same(x, y)?;
        Ok(RingElem {
            level,
            coeffs: rv_add(self.pe, &x.coeffs, &y.coeffs),
        })
    }

    pub fn sub(&self, x: &RingElem, y: &RingElem) -> Result<RingElem> {
        let level = self.expect_same(x, y)?;
        Ok(RingElem {
            level,
            coeffs: rv_sub(self.pe, &x.coeffs, &y.coeffs),
        })
    }

    pub fn neg(&self, x: &RingElem) -> RingElem {
        RingElem {
            level: x.level,
            coeffs: rv_neg(self.pe, &x.coeffs),
        }
    }

    pub fn mul(&self, x: &RingElem, y: &RingElem) -> Result<RingElem> {
        let level = self.expect_same(x, y)?;
        let coeffs = match level {
            Level::Base => vec![zp_mul(self.pe, x.coeffs[0], y.coeffs[0])],
            Level::R => rv_mul(self.pe, &self.h, &x.coeffs, &y.coeffs),
            Level::S => {
                // (a + μb)(c + μd) = (ac + θbd) + μ(ad + bc)
                let m = self.m as usize;
                let (a, b) = (&x.coeffs[..m], &x.coeffs[m..]);
                let (c, d) = (&y.coeffs[..m], &y.coeffs[m..]);
                let th = &self.theta.coeffs;
                let ac = rv_mul(self.pe, &self.h, a, c);
                let bd = rv_mul(self.pe, &self.h, b, d);
                let ad = rv_mul(self.pe, &self.h, a, d);
                let bc = rv_mul(self.pe, &self.h, b, c);
                let mut out = rv_add(self.pe, &ac, &rv_mul(self.pe, &self.h, th, &bd));
                out.extend(rv_add(self.pe, &ad, &bc));
                out
            }
        };
        Ok(RingElem { level, coeffs })
    }

    /// Multiply `x` by a scalar from the same or a lower level.
    pub fn scale(&self, scalar: &RingElem, x: &RingElem) -> Result<RingElem> {
        let mut s = scalar.clone();
        while s.level < x.level {
            s = self.promote(&s)?;
        }
        self.mul(&s, x)
    }

    pub fn pow(&self, x: &RingElem, k: u128) -> RingElem {
        self.pow_unchecked(x, k)
    }

    fn pow_unchecked(&self, x: &RingElem, mut k: u128) -> RingElem {
        let mut acc = self.one(x.level);
        let mut base = x.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base).expect("same level");
            }
            base = self.mul(&base, &base).expect("same level");
            k >>= 1;
        }
        acc
    }

    /// p-adic valuation: the largest `v ≤ e` with `x ∈ p^v · (level ring)`.
    pub fn valuation(&self, x: &RingElem) -> u32 {
        x.coeffs
            .iter()
            .map(|&c| zp_val(self.p, self.e, c))
            .min()
            .unwrap_or(self.e)
    }

    /// Units are exactly the elements with nonzero residue.
    pub fn is_unit(&self, x: &RingElem) -> bool {
        self.valuation(x) == 0
    }

    /// Inverse of a unit via Lagrange: `x^{|units| - 1}`.
    pub fn inv(&self, x: &RingElem) -> Result<RingElem> {
        let v = self.valuation(x);
        if v > 0 {
            return Err(Error::NotAUnit { valuation: v });
        }
        let units: u128 = match x.level {
            Level::Base => (self.p as u128).pow(self.e - 1) * (self.p as u128 - 1),
            Level::R => (self.q as u128).pow(self.e - 1) * (self.q as u128 - 1),
            Level::S => {
                let qq = self.q as u128 * self.q as u128;
                qq.pow(self.e - 1) * (qq - 1)
            }
        };
        let inv = self.pow_unchecked(x, units - 1);
        debug_assert_eq!(self.mul(&inv, x).unwrap(), self.one(x.level));
        Ok(inv)
    }

    /// Generalized Frobenius of `S|R`: `φ(a + μb) = a - μb`. It is the unique
    /// nontrivial `R`-automorphism, has order 2, and fixes exactly `R`.
    pub fn frobenius(&self, s: &RingElem) -> Result<RingElem> {
        self.expect(Level::S, s)?;
        let (a, b) = self.split_s(s);
        let mut coeffs = a;
        coeffs.extend(rv_neg(self.pe, &b));
        Ok(RingElem {
            level: Level::S,
            coeffs,
        })
    }

    /// Trace of `S|R`: `Tr(s) = s + φ(s) = 2a`, an element of `R`.
    pub fn trace(&self, s: &RingElem) -> Result<RingElem> {
        self.expect(Level::S, s)?;
        let (a, _) = self.split_s(s);
        Ok(RingElem {
            level: Level::R,
            coeffs: rv_add(self.pe, &a, &a),
        })
    }

    /// Teichmüller lift: the unique root of `t^{|residue field|} = t`
    /// congruent to `x` mod p. Iterates the appropriate power map.
    pub fn teichmuller_lift(&self, x: &RingElem) -> RingElem {
        let exp: u128 = match x.level {
            Level::Base => self.p as u128,
            Level::R => self.q as u128,
            Level::S => self.q as u128 * self.q as u128,
        };
        let mut t = x.clone();
        for _ in 0..=self.e {
            let next = self.pow_unchecked(&t, exp);
            if next == t {
                break;
            }
            t = next;
        }
        debug_assert_eq!(self.pow_unchecked(&t, exp), t);
        t
    }

    /// Coefficients reduced mod p: the image in the residue tower
    /// `F_p ⊆ F_q ⊆ F_{q^2}`, represented inside the same context.
    pub fn residue_reduce(&self, x: &RingElem) -> RingElem {
        RingElem {
            level: x.level,
            coeffs: x.coeffs.iter().map(|&c| c % self.p).collect(),
        }
    }

    fn residue_is_one(&self, x: &RingElem) -> bool {
        x.coeffs[0] % self.p == 1 && x.coeffs[1..].iter().all(|&c| c % self.p == 0)
    }

    /// Number of elements at a level, as a u128 (towers can outgrow u64).
    pub fn element_count(&self, level: Level) -> u128 {
        (self.pe as u128).pow(self.dim(level) as u32)
    }

    /// All elements of a level in canonical (lexicographic) order.
    pub fn elements(&self, level: Level) -> ElemIter {
        ElemIter {
            level,
            radix: self.pe,
            digits: vec![0; self.dim(level)],
            done: false,
        }
    }

    /// Elements with coefficients < p, i.e. canonical residue representatives,
    /// in canonical order.
    pub fn residue_elements(&self, level: Level) -> ElemIter {
        ElemIter {
            level,
            radix: self.p,
            digits: vec![0; self.dim(level)],
            done: false,
        }
    }
}

/// Odometer over coefficient vectors; yields elements in canonical order.
pub struct ElemIter {
    level: Level,
    radix: u64,
    digits: Vec<u64>,
    done: bool,
}

impl Iterator for ElemIter {
    type Item = RingElem;

    fn next(&mut self) -> Option<RingElem> {
        if self.done {
            return None;
        }
        let out = RingElem {
            level: self.level,
            coeffs: self.digits.clone(),
        };
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.radix {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_321() -> Arc<ExtensionContext> {
        ExtensionContext::new(3, 2, 1).unwrap()
    }

    fn s(ctx: &ExtensionContext, a: u64, b: u64) -> RingElem {
        ctx.s_elem(&ctx.r_from_base(a), &ctx.r_from_base(b))
            .unwrap()
    }

    #[test]
    fn rejects_even_and_composite_characteristic() {
        assert_eq!(
            ExtensionContext::new(2, 1, 1).unwrap_err(),
            Error::UnsupportedCharacteristic(2)
        );
        assert_eq!(
            ExtensionContext::new(9, 1, 1).unwrap_err(),
            Error::UnsupportedCharacteristic(9)
        );
        assert_eq!(
            ExtensionContext::new(1, 1, 1).unwrap_err(),
            Error::UnsupportedCharacteristic(1)
        );
        assert!(ExtensionContext::new(3, 0, 1).is_err());
    }

    #[test]
    fn structure_constants_of_z9_alpha() {
        // S = Z_9[α] with α^2 = -1: θ is the Teichmüller lift of 2, i.e. 8
        let ctx = ctx_321();
        assert_eq!(ctx.theta(), &ctx.r_from_base(8));
        assert_eq!(ctx.mu(), &s(&ctx, 0, 1));
        let musq = ctx.mul(ctx.mu(), ctx.mu()).unwrap();
        assert_eq!(musq, s(&ctx, 8, 0));
    }

    #[test]
    fn teichmuller_set_of_z9_is_0_1_8() {
        let ctx = ctx_321();
        let mut fixed: Vec<u64> = Vec::new();
        for t in 0..9u64 {
            let x = ctx.r_from_base(t);
            if ctx.pow(&x, 3) == x {
                fixed.push(t);
            }
        }
        assert_eq!(fixed, vec![0, 1, 8]);
        assert_eq!(
            ctx.teichmuller_lift(&ctx.r_from_base(2)),
            ctx.r_from_base(8)
        );
        assert_eq!(
            ctx.teichmuller_lift(&ctx.r_from_base(5)),
            ctx.r_from_base(8)
        );
        assert_eq!(
            ctx.teichmuller_lift(&ctx.r_from_base(4)),
            ctx.r_from_base(1)
        );
    }

    #[test]
    fn generator_of_z9_alpha_units_has_order_eight() {
        // the smallest residue generating F_9^* is 1+α; its lift is 7+7α
        let ctx = ctx_321();
        let xi = ctx.teichmuller_generator().clone();
        assert_eq!(xi, s(&ctx, 7, 7));
        let mut pow = ctx.one(Level::S);
        let mut order = 0;
        for k in 1..=80 {
            pow = ctx.mul(&pow, &xi).unwrap();
            if pow == ctx.one(Level::S) {
                order = k;
                break;
            }
        }
        assert_eq!(order, 8); // q^2 - 1 with q = 3
        assert_eq!(ctx.pow(&xi, 4), s(&ctx, 8, 0)); // ξ^{(q^2-1)/2} = -1
        assert_eq!(ctx.zeta(), &ctx.r_from_base(8)); // ζ = ξ^{q+1}, order q-1 = 2
    }

    #[test]
    fn frobenius_is_a_ring_involution_fixing_r() {
        let ctx = ctx_321();
        for x in ctx.elements(Level::S) {
            let fx = ctx.frobenius(&x).unwrap();
            assert_eq!(ctx.frobenius(&fx).unwrap(), x, "involution");
            let (_, b) = ctx.decompose(&x).unwrap();
            if b.is_zero() {
                assert_eq!(fx, x, "fixes R");
            }
        }
        // multiplicativity on the full 81x81 grid
        let all: Vec<RingElem> = ctx.elements(Level::S).collect();
        for x in &all {
            for y in &all {
                let lhs = ctx.frobenius(&ctx.mul(x, y).unwrap()).unwrap();
                let rhs = ctx
                    .mul(&ctx.frobenius(x).unwrap(), &ctx.frobenius(y).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn trace_kernel_is_mu_r() {
        // Ker(Tr) = μR, checked by exhaustive scan of S
        let ctx = ctx_321();
        let mut kernel: Vec<RingElem> = ctx
            .elements(Level::S)
            .filter(|x| ctx.trace(x).unwrap().is_zero())
            .collect();
        kernel.sort();
        let mut mu_r: Vec<RingElem> = ctx
            .elements(Level::R)
            .map(|r| ctx.scale(&r, ctx.mu()).unwrap())
            .collect();
        mu_r.sort();
        assert_eq!(kernel, mu_r);
    }

    #[test]
    fn trace_of_5_plus_7alpha_is_1() {
        let ctx = ctx_321();
        assert_eq!(ctx.trace(&s(&ctx, 5, 7)).unwrap(), ctx.r_from_base(1));
    }

    #[test]
    fn decompose_matches_trace_formulas() {
        let ctx = ctx_321();
        let two_inv = ctx.inv(&ctx.r_from_base(2)).unwrap();
        assert_eq!(two_inv, ctx.r_from_base(5));
        let two_mu = ctx.scale(&ctx.r_from_base(2), ctx.mu()).unwrap();
        let two_mu_inv = ctx.inv(&two_mu).unwrap();
        for x in ctx.elements(Level::S) {
            let (a, b) = ctx.decompose(&x).unwrap();
            let a_closed = ctx.mul(&ctx.trace(&x).unwrap(), &two_inv).unwrap();
            assert_eq!(a, a_closed);
            let diff = ctx.sub(&x, &ctx.frobenius(&x).unwrap()).unwrap();
            let b_closed = ctx.mul(&diff, &two_mu_inv).unwrap();
            let (bc, bz) = ctx.decompose(&b_closed).unwrap();
            assert!(bz.is_zero());
            assert_eq!(b, bc);
            // and recomposition round-trips
            assert_eq!(ctx.s_elem(&a, &b).unwrap(), x);
        }
    }

    #[test]
    fn units_are_exactly_the_elements_with_nonzero_residue() {
        let ctx = ctx_321();
        for level in [Level::Base, Level::R, Level::S] {
            for x in ctx.elements(level) {
                let invertible = ctx.inv(&x).is_ok();
                let has_inverse = ctx
                    .elements(level)
                    .any(|y| ctx.mul(&x, &y).unwrap() == ctx.one(level));
                assert_eq!(invertible, has_inverse, "{x:?}");
                assert_eq!(invertible, ctx.is_unit(&x));
                if let Ok(inv) = ctx.inv(&x) {
                    assert_eq!(ctx.mul(&x, &inv).unwrap(), ctx.one(level));
                }
            }
        }
    }

    #[test]
    fn inverse_of_alpha_is_8_alpha() {
        let ctx = ctx_321();
        assert_eq!(ctx.inv(ctx.mu()).unwrap(), s(&ctx, 0, 8));
        assert_eq!(ctx.inv(&ctx.from_base(8)).unwrap(), ctx.from_base(8));
        assert_eq!(
            ctx.inv(&ctx.from_base(3)).unwrap_err(),
            Error::NotAUnit { valuation: 1 }
        );
        assert_eq!(
            ctx.inv(&ctx.zero(Level::R)).unwrap_err(),
            Error::NotAUnit { valuation: 2 }
        );
    }

    #[test]
    fn level_mismatch_is_rejected() {
        let ctx = ctx_321();
        let r = ctx.r_from_base(1);
        let s = ctx.promote(&r).unwrap();
        assert!(matches!(ctx.add(&r, &s), Err(Error::LevelMismatch { .. })));
        assert!(matches!(ctx.trace(&r), Err(Error::LevelMismatch { .. })));
        assert!(matches!(
            ctx.frobenius(&r),
            Err(Error::LevelMismatch { .. })
        ));
    }

    #[test]
    fn degree_two_residue_field_gets_the_smallest_primitive_modulus() {
        // for p = 3, m = 2 the lex-smallest primitive polynomial is y^2 + y + 2
        let ctx = ExtensionContext::new(3, 1, 2).unwrap();
        assert_eq!(ctx.modulus(), &[2, 1, 1]);
        // θ reduces to y, the smallest non-square of F_9
        assert_eq!(
            ctx.residue_reduce(ctx.theta()),
            ctx.r_elem(&[0, 1]).unwrap()
        );

        // the corrected lift at e = 2 reduces to the same polynomial and
        // turns y into a Teichmüller element: y^q = y
        let ctx2 = ExtensionContext::new(3, 2, 2).unwrap();
        assert_eq!(
            ctx2.modulus().iter().map(|c| c % 3).collect::<Vec<_>>(),
            vec![2, 1, 1]
        );
        let y = ctx2.r_elem(&[0, 1]).unwrap();
        assert_eq!(ctx2.pow(&y, ctx2.q() as u128), y);
        // θ is Teichmüller and a non-square in the residue field
        let th = ctx2.theta().clone();
        assert_eq!(ctx2.pow(&th, ctx2.q() as u128), th);
    }

    #[test]
    fn xi_has_full_teichmuller_order_in_larger_towers() {
        for (p, e, m) in [
            (3, 1, 1),
            (3, 1, 2),
            (5, 1, 1),
            (5, 2, 1),
            (7, 1, 1),
            (3, 2, 2),
        ] {
            let ctx = ExtensionContext::new(p, e, m).unwrap();
            let xi = ctx.teichmuller_generator();
            let qq = ctx.q() as u128 * ctx.q() as u128;
            assert_eq!(ctx.pow(xi, qq - 1), ctx.one(Level::S), "({p},{e},{m})");
            for ell in prime_factors(qq - 1) {
                assert_ne!(
                    ctx.pow(xi, (qq - 1) / ell),
                    ctx.one(Level::S),
                    "({p},{e},{m})"
                );
            }
            // ζ ∈ R with order q - 1
            let zeta = ctx.zeta();
            assert_eq!(ctx.pow(zeta, (ctx.q() - 1) as u128), ctx.one(Level::R));
            // trace lands in R and kernel contains μR (spot check via μ itself)
            assert!(ctx.trace(ctx.mu()).unwrap().is_zero());
        }
    }

    #[test]
    fn canonical_element_order_is_lexicographic() {
        let ctx = ctx_321();
        let all: Vec<RingElem> = ctx.elements(Level::S).collect();
        assert_eq!(all.len(), 81);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted, "iteration follows the canonical order");
        assert_eq!(all[0], ctx.zero(Level::S));
        assert_eq!(all[1], s(&ctx, 0, 1)); // α precedes 1 lexicographically
        assert_eq!(all[9], s(&ctx, 1, 0));
    }
}
