//! Linear algebra over one level of the chain-ring tower.
//!
//! Matrices over a finite chain ring `V` (here `Z_{p^e}`, `R`, or `S`) do not
//! admit reduced row echelon forms in the field sense, but every row module
//! has a unique **Howell form**: an echelon matrix whose pivots are the prime
//! powers `p^v`, augmented by "shadow" rows so that greedy reduction decides
//! membership, with entries above each pivot reduced to canonical residues
//! mod `p^v`. Two row modules are equal iff their Howell forms are identical,
//! which is the equality the rest of the crate relies on.
//!
//! Freeness of a row module is **not** visible in Howell pivots — over `Z_9`
//! the single row `(3, 1)` is free of rank one, yet its Howell form has two
//! pivots of valuation one. Freeness is read off the Smith profile instead:
//! the module is free exactly when every elementary divisor is a unit.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring_tower::{ExtensionContext, Level, RingElem};

/// Dense row-major matrix over one level of a tower.
#[derive(Clone, PartialEq, Eq)]
pub struct ChainMat {
    ctx: Arc<ExtensionContext>,
    level: Level,
    rows: usize,
    cols: usize,
    entries: Vec<RingElem>,
}

impl std::fmt::Debug for ChainMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "ChainMat {}x{} at {:?} [",
            self.rows, self.cols, self.level
        )?;
        for i in 0..self.rows {
            let row: Vec<&[u64]> = self.row(i).iter().map(|e| e.coeffs()).collect();
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// Howell form `H` of a matrix `M`, with a transform `U` satisfying
/// `U · M = H`. `U` can have more rows than `M` because shadow rows enter the
/// form; `pivots[i] = (column, valuation)` describes row `i` of `H`.
#[derive(Clone)]
pub struct HowellForm {
    pub h: ChainMat,
    pub u: ChainMat,
    pub pivots: Vec<(usize, u32)>,
}

/// Shape of a row module: `free_rank` comes from the Smith profile,
/// `pivot_vals` are the Howell pivot valuations, and `log_cardinality` is
/// `Σ (e - v_i)`, so the module has `|residue field|^log_cardinality`
/// elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankProfile {
    pub free_rank: usize,
    pub pivot_vals: Vec<u32>,
    pub log_cardinality: u32,
}

/// Worklist pivot slot: (reduced row, transform wrt original rows, valuation).
type PivotSlot = (Vec<RingElem>, Vec<RingElem>, u32);

impl ChainMat {
    pub fn zero(ctx: Arc<ExtensionContext>, level: Level, rows: usize, cols: usize) -> Self {
        let entries = vec![ctx.zero(level); rows * cols];
        ChainMat {
            ctx,
            level,
            rows,
            cols,
            entries,
        }
    }

    pub fn identity(ctx: Arc<ExtensionContext>, level: Level, n: usize) -> Self {
        let mut m = Self::zero(ctx, level, n, n);
        for i in 0..n {
            let one = m.ctx.one(level);
            m.set(i, i, one);
        }
        m
    }

    /// Build from explicit rows; `cols` disambiguates the empty matrix.
    pub fn from_rows(
        ctx: Arc<ExtensionContext>,
        level: Level,
        cols: usize,
        data: Vec<Vec<RingElem>>,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(data.len() * cols);
        let rows = data.len();
        for row in data {
            if row.len() != cols {
                return Err(Error::ShapeError(format!(
                    "row has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for x in row {
                if x.level() != level {
                    return Err(Error::LevelMismatch {
                        expected: level,
                        found: x.level(),
                    });
                }
                entries.push(x);
            }
        }
        Ok(ChainMat {
            ctx,
            level,
            rows,
            cols,
            entries,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn level(&self) -> Level {
        self.level
    }
    pub fn context(&self) -> &Arc<ExtensionContext> {
        &self.ctx
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &RingElem {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[RingElem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RingElem) {
        debug_assert_eq!(v.level(), self.level);
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RingElem::is_zero)
    }

    pub fn transpose(&self) -> ChainMat {
        let mut t = ChainMat::zero(self.ctx.clone(), self.level, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.at(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &ChainMat) -> Result<ChainMat> {
        if self.cols != other.rows || self.level != other.level {
            return Err(Error::ShapeError(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ctx = &self.ctx;
        let mut out = ChainMat::zero(ctx.clone(), self.level, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = ctx.mul(a, other.at(k, j))?;
                    let s = ctx.add(out.at(i, j), &t)?;
                    out.set(i, j, s);
                }
            }
        }
        Ok(out)
    }

    pub fn stack(&self, other: &ChainMat) -> Result<ChainMat> {
        if self.cols != other.cols || self.level != other.level {
            return Err(Error::ShapeError("stack expects equal widths".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(ChainMat {
            ctx: self.ctx.clone(),
            level: self.level,
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Canonical Howell form with transform.
    ///
    /// Worklist elimination: each incoming row is greedily reduced by the
    /// current pivots; a row that improves a pivot valuation replaces the
    /// incumbent, which is requeued. Every inserted pivot of valuation
    /// `v > 0` spawns its annihilator shadow `p^{e-v} ·` row, so the final
    /// form supports complete greedy membership tests. Rows above each pivot
    /// are then reduced to canonical residues mod `p^v`.
    pub fn howell(&self) -> HowellForm {
        let ctx = &self.ctx;
        let e = ctx.e();
        let mut pivots: Vec<Option<PivotSlot>> = vec![None; self.cols];
        let mut queue: Vec<(Vec<RingElem>, Vec<RingElem>)> = (0..self.rows)
            .map(|i| {
                let mut t = vec![ctx.zero(self.level); self.rows];
                t[i] = ctx.one(self.level);
                (self.row(i).to_vec(), t)
            })
            .collect();

        while let Some((mut row, mut tr)) = queue.pop() {
            let mut lead = None;
            for j in 0..self.cols {
                if row[j].is_zero() {
                    continue;
                }
                let w = ctx.valuation(&row[j]);
                match &pivots[j] {
                    Some((prow, ptr, v)) if *v <= w => {
                        // cancel: row[j] = (row[j]/p^v) · p^v
                        let c = ctx.quo_pv(&row[j], *v);
                        for k in j..self.cols {
                            let t = ctx.mul(&c, &prow[k]).unwrap();
                            row[k] = ctx.sub(&row[k], &t).unwrap();
                        }
                        for (tk, pk) in tr.iter_mut().zip(ptr) {
                            let t = ctx.mul(&c, pk).unwrap();
                            *tk = ctx.sub(tk, &t).unwrap();
                        }
                        debug_assert!(row[j].is_zero());
                    }
                    _ => {
                        lead = Some((j, w));
                        break;
                    }
                }
            }
            let Some((j, w)) = lead else { continue }; // row reduced to zero
                                                       // normalize so the leading entry is exactly p^w
            let unit = ctx.quo_pv(&row[j], w);
            let uinv = ctx.inv(&unit).expect("cofactor of p^v is a unit");
            for x in row.iter_mut().chain(tr.iter_mut()) {
                *x = ctx.mul(&uinv, x).unwrap();
            }
            // the displaced pivot (larger valuation) goes back in the queue
            if let Some((orow, otr, _)) = pivots[j].replace((row.clone(), tr.clone(), w)) {
                queue.push((orow, otr));
            }
            if w > 0 {
                // shadow: p^{e-w} times the new pivot row
                let c = ctx.pv(e - w);
                let srow = row.iter().map(|x| ctx.base_scale(c, x)).collect();
                let str_ = tr.iter().map(|x| ctx.base_scale(c, x)).collect();
                queue.push((srow, str_));
            }
        }

        let mut hrows: Vec<Vec<RingElem>> = Vec::new();
        let mut urows: Vec<Vec<RingElem>> = Vec::new();
        let mut pv: Vec<(usize, u32)> = Vec::new();
        for (j, slot) in pivots.into_iter().enumerate() {
            if let Some((row, tr, v)) = slot {
                hrows.push(row);
                urows.push(tr);
                pv.push((j, v));
            }
        }
        // reduce entries above each pivot to their canonical residue mod p^v
        for (r, &(j, v)) in pv.iter().enumerate() {
            let pvu = ctx.pv(v);
            for i in 0..r {
                let c = ctx.quo_pv(&hrows[i][j], v);
                if c.is_zero() {
                    continue;
                }
                for k in j..self.cols {
                    let t = ctx.mul(&c, &hrows[r][k]).unwrap();
                    hrows[i][k] = ctx.sub(&hrows[i][k], &t).unwrap();
                }
                for k in 0..self.rows {
                    let t = ctx.mul(&c, &urows[r][k]).unwrap();
                    urows[i][k] = ctx.sub(&urows[i][k], &t).unwrap();
                }
                debug_assert!(hrows[i][j].coeffs().iter().all(|&x| x < pvu));
            }
        }

        let h = ChainMat::from_rows(ctx.clone(), self.level, self.cols, hrows).unwrap();
        let u = ChainMat::from_rows(ctx.clone(), self.level, self.rows, urows).unwrap();
        debug_assert_eq!(u.mul(self).unwrap(), h);
        HowellForm { h, u, pivots: pv }
    }

    /// Valuations of the elementary divisors (Smith profile), ascending.
    /// The row module is free iff every listed valuation is zero, and its
    /// free rank is the number of zeros.
    pub fn smith_profile(&self) -> Vec<u32> {
        let ctx = &self.ctx;
        let e = ctx.e();
        let mut w: Vec<Vec<RingElem>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut profile = Vec::new();
        let mut t = 0usize;
        loop {
            // global minimum valuation in the trailing submatrix
            let mut best: Option<(usize, usize, u32)> = None;
            for i in t..self.rows {
                for j in t..self.cols {
                    if w[i][j].is_zero() {
                        continue;
                    }
                    let v = ctx.valuation(&w[i][j]);
                    if best.is_none_or(|(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
            let Some((bi, bj, v)) = best else { break };
            debug_assert!(v < e);
            w.swap(t, bi);
            for row in w.iter_mut() {
                row.swap(t, bj);
            }
            let unit = ctx.quo_pv(&w[t][t], v);
            let uinv = ctx.inv(&unit).expect("cofactor of p^v is a unit");
            for j in t..self.cols {
                w[t][j] = ctx.mul(&uinv, &w[t][j]).unwrap();
            }
            // the corner p^v divides everything remaining: clear its row/col
            for i in t + 1..self.rows {
                let c = ctx.quo_pv(&w[i][t], v);
                if c.is_zero() {
                    continue;
                }
                for j in t..self.cols {
                    let s = ctx.mul(&c, &w[t][j]).unwrap();
                    w[i][j] = ctx.sub(&w[i][j], &s).unwrap();
                }
            }
            for j in t + 1..self.cols {
                let c = ctx.quo_pv(&w[t][j], v);
                if !c.is_zero() {
                    for i in t..self.rows {
                        let s = ctx.mul(&c, &w[i][t]).unwrap();
                        w[i][j] = ctx.sub(&w[i][j], &s).unwrap();
                    }
                }
            }
            profile.push(v);
            t += 1;
        }
        profile
    }

    pub fn rank_profile(&self) -> RankProfile {
        let smith = self.smith_profile();
        let free_rank = smith.iter().filter(|&&v| v == 0).count();
        let hf = self.howell();
        let pivot_vals: Vec<u32> = hf.pivots.iter().map(|&(_, v)| v).collect();
        let e = self.ctx.e();
        let log_cardinality = pivot_vals.iter().map(|&v| e - v).sum();
        RankProfile {
            free_rank,
            pivot_vals,
            log_cardinality,
        }
    }

    /// Canonical basis of `{x : x · M = 0}`, as a Howell-form matrix with
    /// `self.rows` columns.
    pub fn row_kernel(&self) -> ChainMat {
        let ctx = self.ctx.clone();
        if self.rows == 0 {
            return ChainMat::zero(ctx, self.level, 0, 0);
        }
        if self.cols == 0 {
            return ChainMat::identity(ctx, self.level, self.rows);
        }
        // Howell of [M | I]: rows supported on the identity block span the
        // kernel, by the echelon property at the block boundary.
        let aug = {
            let id = ChainMat::identity(ctx.clone(), self.level, self.rows);
            let mut data = Vec::with_capacity(self.rows);
            for i in 0..self.rows {
                let mut row = self.row(i).to_vec();
                row.extend_from_slice(id.row(i));
                data.push(row);
            }
            ChainMat::from_rows(ctx.clone(), self.level, self.cols + self.rows, data).unwrap()
        };
        let hf = aug.howell();
        let mut rows = Vec::new();
        for (r, &(j, _)) in hf.pivots.iter().enumerate() {
            if j >= self.cols {
                rows.push(hf.h.row(r)[self.cols..].to_vec());
            }
        }
        let k = ChainMat::from_rows(ctx, self.level, self.rows, rows).unwrap();
        debug_assert!(k.mul(self).unwrap().is_zero());
        // already canonical: a Howell trailing block is itself Howell
        k
    }

    /// Invertibility over the chain ring: reducible to the identity with
    /// unit pivots. The empty matrix is invertible.
    pub fn is_invertible(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let ctx = &self.ctx;
        let mut w: Vec<Vec<RingElem>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        for j in 0..self.cols {
            let Some(pi) = (j..self.rows).find(|&i| ctx.is_unit(&w[i][j])) else {
                return false;
            };
            w.swap(j, pi);
            let inv = ctx.inv(&w[j][j]).unwrap();
            for k in j..self.cols {
                w[j][k] = ctx.mul(&inv, &w[j][k]).unwrap();
            }
            for i in 0..self.rows {
                if i == j || w[i][j].is_zero() {
                    continue;
                }
                let c = w[i][j].clone();
                for k in j..self.cols {
                    let t = ctx.mul(&c, &w[j][k]).unwrap();
                    w[i][k] = ctx.sub(&w[i][k], &t).unwrap();
                }
            }
        }
        true
    }
}

impl HowellForm {
    /// Greedy residual of `word` after reduction by the form. Membership in
    /// the row module is equivalent to a zero residual.
    pub fn reduce(&self, word: &[RingElem]) -> Vec<RingElem> {
        let ctx = self.h.context().clone();
        let mut x = word.to_vec();
        for (r, &(j, v)) in self.pivots.iter().enumerate() {
            if x[j].is_zero() {
                continue;
            }
            if ctx.valuation(&x[j]) < v {
                continue; // cannot be cancelled; residual stays nonzero
            }
            let c = ctx.quo_pv(&x[j], v);
            for k in j..self.h.cols() {
                let t = ctx.mul(&c, self.h.at(r, k)).unwrap();
                x[k] = ctx.sub(&x[k], &t).unwrap();
            }
        }
        x
    }

    pub fn is_member(&self, word: &[RingElem]) -> bool {
        self.reduce(word).iter().all(RingElem::is_zero)
    }

    /// Coefficients `c` over the form's rows with `c · H = word`, if any.
    pub fn coefficients_for(&self, word: &[RingElem]) -> Option<Vec<RingElem>> {
        let ctx = self.h.context().clone();
        let mut x = word.to_vec();
        let mut coeffs = vec![ctx.zero(self.h.level()); self.h.rows()];
        for (r, &(j, v)) in self.pivots.iter().enumerate() {
            if x[j].is_zero() {
                continue;
            }
            if ctx.valuation(&x[j]) < v {
                return None;
            }
            let c = ctx.quo_pv(&x[j], v);
            for k in j..self.h.cols() {
                let t = ctx.mul(&c, self.h.at(r, k)).unwrap();
                x[k] = ctx.sub(&x[k], &t).unwrap();
            }
            coeffs[r] = c;
        }
        if x.iter().all(RingElem::is_zero) {
            Some(coeffs)
        } else {
            None
        }
    }
}

/// Solve `x · A = target` over the chain ring, if solvable: reduce the target
/// through the Howell form and pull the combination back through `U`.
pub fn solve_left(a: &ChainMat, target: &[RingElem]) -> Option<Vec<RingElem>> {
    let ctx = a.context().clone();
    let hf = a.howell();
    let c = hf.coefficients_for(target)?;
    // x = c · U
    let mut x = vec![ctx.zero(a.level()); a.rows()];
    for (r, ci) in c.iter().enumerate() {
        if ci.is_zero() {
            continue;
        }
        for k in 0..a.rows() {
            let t = ctx.mul(ci, hf.u.at(r, k)).unwrap();
            x[k] = ctx.add(&x[k], &t).unwrap();
        }
    }
    debug_assert!({
        let xm = ChainMat::from_rows(ctx.clone(), a.level(), a.rows(), vec![x.clone()])
            .unwrap()
            .mul(a)
            .unwrap();
        xm.row(0) == target
    });
    Some(x)
}

/// Canonical form of the module sum `A + B`.
pub fn module_sum(a: &ChainMat, b: &ChainMat) -> Result<ChainMat> {
    Ok(a.stack(b)?.howell().h)
}

/// Canonical form of the module intersection `A ∩ B`: kernel vectors
/// `(x, y)` of the stacked matrix satisfy `x·A = -y·B`, so their `A`-parts
/// sweep out exactly the intersection.
pub fn module_intersect(a: &ChainMat, b: &ChainMat) -> Result<ChainMat> {
    let stacked = a.stack(b)?;
    let ker = stacked.row_kernel();
    let mut rows = Vec::new();
    for i in 0..ker.rows() {
        let x = &ker.row(i)[..a.rows()];
        let xa = ChainMat::from_rows(a.context().clone(), a.level(), a.rows(), vec![x.to_vec()])?
            .mul(a)?;
        rows.push(xa.row(0).to_vec());
    }
    let m = ChainMat::from_rows(a.context().clone(), a.level(), a.cols(), rows)?;
    Ok(m.howell().h)
}
