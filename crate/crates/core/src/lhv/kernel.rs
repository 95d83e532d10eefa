//! Alice enumeration in Gray-code order with Bob best response.
//!
//! For a fixed Alice assignment `alpha` the objective splits over Bob's
//! settings: with `G[y][t] = sum_{x,s} M[m s + x][m t + y] w^(s alpha_x)`,
//! Bob's setting `y` contributes `Re sum_t G[y][t] w^(t beta)` and is
//! maximised on its own. Consecutive Gray-code assignments differ in a single
//! digit that moves by `+1 mod q`, so `G` is updated with one precomputed
//! difference vector per step.

use std::ops::{Add, AddAssign, Sub};

use num_complex::{Complex, Complex64};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Number of contiguous index ranges the Alice space is split into. Fixed so
/// that results never depend on the number of worker threads.
const CHUNKS: u64 = 256;

pub(crate) trait Arith: Sync {
    type C: Copy + Send + Sync + Add<Output = Self::C> + Sub<Output = Self::C> + AddAssign;
    type R: Copy + Send + Sync + PartialOrd + AddAssign + Default;
    fn zero(&self) -> Self::C;
    /// `z w^k`.
    fn rot(&self, z: Self::C, k: usize) -> Self::C;
    /// `Re(z w^k)`.
    fn re_rot(&self, z: Self::C, k: usize) -> Self::R;
    /// Whether `v` counts as equal to the maximum `best`.
    fn ties(&self, best: Self::R, v: Self::R) -> bool;
}

/// Gaussian-integer arithmetic for two or four outcomes.
pub(crate) struct Gauss {
    /// Quarter turns per power of `w`.
    step: usize,
}

impl Gauss {
    pub(crate) fn new(q: usize) -> Self {
        debug_assert!(q == 2 || q == 4);
        Gauss { step: 4 / q }
    }
}

impl Arith for Gauss {
    type C = Complex<i64>;
    type R = i64;
    fn zero(&self) -> Self::C {
        Complex::new(0, 0)
    }
    fn rot(&self, z: Self::C, k: usize) -> Self::C {
        match (k * self.step) % 4 {
            0 => z,
            1 => Complex::new(-z.im, z.re),
            2 => Complex::new(-z.re, -z.im),
            _ => Complex::new(z.im, -z.re),
        }
    }
    fn re_rot(&self, z: Self::C, k: usize) -> i64 {
        match (k * self.step) % 4 {
            0 => z.re,
            1 => -z.im,
            2 => -z.re,
            _ => z.im,
        }
    }
    fn ties(&self, best: i64, v: i64) -> bool {
        best == v
    }
}

/// Double-precision arithmetic with a relative tie tolerance.
pub(crate) struct Float {
    roots: Vec<Complex64>,
    tol: f64,
}

impl Float {
    pub(crate) fn new(q: usize, tol: f64) -> Self {
        Float {
            roots: (0..q).map(|k| crate::scalar::root_of_unity(q, k)).collect(),
            tol,
        }
    }
}

impl Arith for Float {
    type C = Complex64;
    type R = f64;
    fn zero(&self) -> Self::C {
        Complex64::new(0.0, 0.0)
    }
    fn rot(&self, z: Self::C, k: usize) -> Self::C {
        z * self.roots[k % self.roots.len()]
    }
    fn re_rot(&self, z: Self::C, k: usize) -> f64 {
        let w = self.roots[k % self.roots.len()];
        z.re * w.re - z.im * w.im
    }
    fn ties(&self, best: f64, v: f64) -> bool {
        (best - v).abs() <= self.tol * (1.0 + best.abs())
    }
}

pub(crate) struct Kernel<A: Arith> {
    pub(crate) arith: A,
    m: usize,
    q: usize,
    /// Matrix entries, row-major, order `m q`.
    k: Vec<A::C>,
    /// `deltas[(j q + old) m q + y q + t]`: change of `G[y][t]` when
    /// `alpha_j` moves from `old` to `old + 1`.
    deltas: Vec<A::C>,
}

impl<A: Arith> Kernel<A> {
    pub(crate) fn new(arith: A, m: usize, q: usize, k: Vec<A::C>) -> Self {
        let n = m * q;
        debug_assert_eq!(k.len(), n * n);
        let mut deltas = vec![arith.zero(); m * q * n];
        for j in 0..m {
            for old in 0..q {
                let base = (j * q + old) * n;
                for y in 0..m {
                    for t in 0..q {
                        let mut acc = arith.zero();
                        for s in 1..q {
                            let z = k[(m * s + j) * n + m * t + y];
                            acc += arith.rot(z, s * (old + 1)) - arith.rot(z, s * old);
                        }
                        deltas[base + y * q + t] = acc;
                    }
                }
            }
        }
        Kernel {
            arith,
            m,
            q,
            k,
            deltas,
        }
    }

    pub(crate) fn m(&self) -> usize {
        self.m
    }

    pub(crate) fn q(&self) -> usize {
        self.q
    }

    /// Number of Alice assignments, `q^m`, saturating.
    pub(crate) fn alice_states(&self) -> u128 {
        (0..self.m).fold(1u128, |acc, _| acc.saturating_mul(self.q as u128))
    }

    fn state(&self, alpha: &[usize]) -> Vec<A::C> {
        let (m, q) = (self.m, self.q);
        let n = m * q;
        let mut g = vec![self.arith.zero(); n];
        for y in 0..m {
            for t in 0..q {
                let mut acc = self.arith.zero();
                for s in 0..q {
                    for (x, &ax) in alpha.iter().enumerate() {
                        acc += self.arith.rot(self.k[(m * s + x) * n + m * t + y], s * ax);
                    }
                }
                g[y * q + t] = acc;
            }
        }
        g
    }

    /// Contribution of Bob's setting `y` when he answers `w^beta`.
    pub(crate) fn bob_value(&self, g: &[A::C], y: usize, beta: usize) -> A::R {
        let mut v = A::R::default();
        for t in 0..self.q {
            v += self.arith.re_rot(g[y * self.q + t], t * beta);
        }
        v
    }

    /// Best response value and the first maximising answer for setting `y`.
    pub(crate) fn bob_best(&self, g: &[A::C], y: usize) -> (A::R, usize) {
        let mut best = self.bob_value(g, y, 0);
        let mut arg = 0;
        for beta in 1..self.q {
            let v = self.bob_value(g, y, beta);
            if v > best {
                best = v;
                arg = beta;
            }
        }
        (best, arg)
    }

    /// Answers of setting `y` tying the best response.
    pub(crate) fn bob_ties(&self, g: &[A::C], y: usize) -> Vec<usize> {
        let (best, _) = self.bob_best(g, y);
        (0..self.q)
            .filter(|&b| self.arith.ties(best, self.bob_value(g, y, b)))
            .collect()
    }

    pub(crate) fn value(&self, g: &[A::C]) -> A::R {
        let mut v = A::R::default();
        for y in 0..self.m {
            v += self.bob_best(g, y).0;
        }
        v
    }

    /// Visit Alice indices `lo..hi` in Gray-code order.
    pub(crate) fn walk(&self, lo: u64, hi: u64, mut f: impl FnMut(&[usize], &[A::C])) {
        if lo >= hi {
            return;
        }
        let (m, q) = (self.m, self.q);
        let n = m * q;
        let mut digits = base_digits(lo, m, q);
        let mut alpha = gray_from_digits(&digits, q);
        let mut g = self.state(&alpha);
        f(&alpha, &g);
        for _ in lo + 1..hi {
            // The Gray digit that changes is the lowest digit of the counter
            // that is not q-1; it moves by +1 mod q.
            let j = digits.iter().position(|&d| d != q - 1).expect("index in range");
            for d in &mut digits[..j] {
                *d = 0;
            }
            digits[j] += 1;
            let old = alpha[j];
            alpha[j] = (old + 1) % q;
            let base = (j * q + old) * n;
            for (gi, &d) in g.iter_mut().zip(&self.deltas[base..base + n]) {
                *gi += d;
            }
            f(&alpha, &g);
        }
    }
}

pub(crate) fn base_digits(mut i: u64, m: usize, q: usize) -> Vec<usize> {
    let mut d = vec![0; m];
    for slot in d.iter_mut() {
        *slot = (i % q as u64) as usize;
        i /= q as u64;
    }
    d
}

/// Modular `q`-ary Gray code: `g_j = d_j - d_{j+1} mod q`.
pub(crate) fn gray_from_digits(d: &[usize], q: usize) -> Vec<usize> {
    (0..d.len())
        .map(|j| {
            let next = d.get(j + 1).copied().unwrap_or(0);
            (d[j] + q - next) % q
        })
        .collect()
}

/// Fixed contiguous split of `0..total`.
pub(crate) fn chunks(total: u64) -> Vec<(u64, u64)> {
    let c = total.clamp(1, CHUNKS);
    (0..c)
        .map(|k| {
            let lo = (total as u128 * k as u128 / c as u128) as u64;
            let hi = (total as u128 * (k + 1) as u128 / c as u128) as u64;
            (lo, hi)
        })
        .collect()
}

/// Run `f` on every chunk of `0..total` in a pool of `threads` workers
/// (`0` means all available cores) and return results in chunk order.
pub(crate) fn par_chunks<T, F>(total: u64, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
{
    let parts = chunks(total);
    if threads == 1 {
        return Ok(parts.into_iter().map(|(lo, hi)| f(lo, hi)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    Ok(pool.install(|| parts.par_iter().map(|&(lo, hi)| f(lo, hi)).collect()))
}
