//! Two-outcome correlation games: `C = max_a sum_y |sum_x H[x][y] a_x|`.
//!
//! Alice's first sign is fixed to `+1` because `(a, b) -> (-a, -b)` leaves
//! every correlator unchanged. Sign vectors are bit masks with bit `x` set
//! when `a_x = -1`.

use crate::error::{Error, Result};

use super::kernel::par_chunks;
use super::LhvConfig;

pub(crate) struct CorrelationScan<'a> {
    m: usize,
    h: &'a [i64],
}

impl<'a> CorrelationScan<'a> {
    pub(crate) fn new(m: usize, h: &'a [i64], cfg: &LhvConfig) -> Result<Self> {
        if m == 0 || h.len() != m * m {
            return Err(Error::Dimension(format!("core of order {m} needs {} entries", m * m)));
        }
        let states = 1u128 << (m - 1).min(127);
        if m > 64 || states > cfg.budget {
            return Err(Error::Budget {
                required: if m > 128 { u128::MAX } else { states },
                budget: cfg.budget,
            });
        }
        let total: u128 = h.iter().map(|v| v.unsigned_abs() as u128).sum();
        if total >= 1 << 61 {
            return Err(Error::Overflow("core entries too large for 64-bit column sums".into()));
        }
        Ok(CorrelationScan { m, h })
    }

    fn states(&self) -> u64 {
        1u64 << (self.m - 1)
    }

    /// Column sums `c_y = sum_x H[x][y] a_x` for the sign mask `a`.
    pub(crate) fn column_sums(&self, a: u64) -> Vec<i64> {
        let m = self.m;
        let mut c = vec![0i64; m];
        for x in 0..m {
            let neg = (a >> x) & 1 == 1;
            for (y, cy) in c.iter_mut().enumerate() {
                let h = self.h[x * m + y];
                *cy += if neg { -h } else { h };
            }
        }
        c
    }

    /// Visit masks of indices `lo..hi` (binary reflected Gray code on bits `1..m`).
    fn walk(&self, lo: u64, hi: u64, mut f: impl FnMut(u64, &[i64])) {
        if lo >= hi {
            return;
        }
        let m = self.m;
        let mut a = (lo ^ (lo >> 1)) << 1;
        let mut c = self.column_sums(a);
        f(a, &c);
        for i in lo + 1..hi {
            let x = i.trailing_zeros() as usize + 1;
            // a_x flips sign: c_y changes by -2 a_x H[x][y].
            let was_neg = (a >> x) & 1 == 1;
            let row = &self.h[x * m..(x + 1) * m];
            for (cy, &h) in c.iter_mut().zip(row) {
                *cy += if was_neg { 2 * h } else { -2 * h };
            }
            a ^= 1 << x;
            f(a, &c);
        }
    }

    /// Maximum and the first mask attaining it.
    pub(crate) fn maximum(&self, threads: usize) -> Result<(i64, u64)> {
        let parts = par_chunks(self.states(), threads, |lo, hi| {
            let mut best: Option<(i64, u64)> = None;
            self.walk(lo, hi, |a, c| {
                let v: i64 = c.iter().map(|v| v.abs()).sum();
                if best.is_none_or(|(b, _)| v > b) {
                    best = Some((v, a));
                }
            });
            best
        })?;
        let mut best: Option<(i64, u64)> = None;
        for (v, a) in parts.into_iter().flatten() {
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, a));
            }
        }
        Ok(best.expect("at least one state"))
    }

    /// All masks (with `a_0 = +1`) attaining `target`, in enumeration order.
    pub(crate) fn optimal_masks(&self, target: i64, threads: usize) -> Result<Vec<u64>> {
        let parts = par_chunks(self.states(), threads, |lo, hi| {
            let mut out = Vec::new();
            self.walk(lo, hi, |a, c| {
                if c.iter().map(|v| v.abs()).sum::<i64>() == target {
                    out.push(a);
                }
            });
            out
        })?;
        Ok(parts.into_iter().flatten().collect())
    }
}
