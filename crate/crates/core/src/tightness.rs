//! Optimal vertices of two-outcome correlation games and their affine rank.
//!
//! A game is tight when the vertices attaining the LHV value span an affine
//! subspace of dimension `m^2 - 1` in the space of `m x m` correlators.
//!
//! The rank is computed by elimination modulo the prime `2^61 - 1`, which can
//! only undercount. Once the rank stops growing, a basis of the modular
//! kernel is lifted to integers by rational reconstruction and checked
//! against every difference vector in exact arithmetic; a verified kernel of
//! dimension `d - r` proves that the rank is at most `r`. If no certificate
//! can be produced, exact fraction-free elimination over the integers is
//! used instead.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::CorrelationCore;
use crate::lhv::{core_ints, CorrelationScan, LhvConfig};
use crate::scalar::Real;

/// A `+-1` correlation vector `v[x m + y] = a_x b_y`, one bit per entry
/// (set for `-1`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    m: usize,
    words: Box<[u64]>,
}

impl Vertex {
    /// Vertex of the sign vectors given as masks (bit set for `-1`).
    pub fn from_masks(m: usize, a: u64, b: u64) -> Self {
        let len = m * m;
        let mut words = vec![0u64; len.div_ceil(64)];
        for x in 0..m {
            let ax = (a >> x) & 1;
            for y in 0..m {
                if ax ^ ((b >> y) & 1) == 1 {
                    let k = x * m + y;
                    words[k / 64] |= 1 << (k % 64);
                }
            }
        }
        Vertex {
            m,
            words: words.into_boxed_slice(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m * self.m
    }

    fn bit(&self, k: usize) -> bool {
        (self.words[k / 64] >> (k % 64)) & 1 == 1
    }

    pub fn entry(&self, x: usize, y: usize) -> i8 {
        if self.bit(x * self.m + y) {
            -1
        } else {
            1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.dim()).map(|k| if self.bit(k) { -1 } else { 1 }).collect()
    }

    /// `(self - base) / 2`, entries in `{-1, 0, 1}`.
    fn half_difference(&self, base: &Vertex) -> Vec<i8> {
        (0..self.dim())
            .map(|k| match (self.bit(k), base.bit(k)) {
                (false, true) => 1,
                (true, false) => -1,
                _ => 0,
            })
            .collect()
    }
}

impl std::fmt::Debug for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = self.signs().iter().map(|&v| if v > 0 { '+' } else { '-' }).collect();
        write!(f, "Vertex({s})")
    }
}

/// Optimal value (in core units) and all distinct optimal vertices, sorted.
pub fn collect_vertices_with_value(core: &CorrelationCore, cfg: &LhvConfig) -> Result<(i64, Vec<Vertex>)> {
    let h = core_ints(core)?;
    let m = core.m();
    let scan = CorrelationScan::new(m, &h, cfg)?;
    let (best, _) = scan.maximum(cfg.threads)?;
    let masks = scan.optimal_masks(best, cfg.threads)?;
    let mut set = HashSet::new();
    for a in masks {
        let c = scan.column_sums(a);
        let mut forced = 0u64;
        let mut free = Vec::new();
        for (y, &cy) in c.iter().enumerate() {
            match cy.signum() {
                -1 => forced |= 1 << y,
                0 => free.push(y),
                _ => {}
            }
        }
        if free.len() >= 40 {
            return Err(Error::OptimizerCap {
                count: 1u128 << free.len().min(127),
                cap: cfg.optimizer_cap,
            });
        }
        for choice in 0..1u64 << free.len() {
            let mut b = forced;
            for (k, &y) in free.iter().enumerate() {
                if (choice >> k) & 1 == 1 {
                    b |= 1 << y;
                }
            }
            set.insert(Vertex::from_masks(m, a, b));
            if set.len() as u128 > cfg.optimizer_cap {
                return Err(Error::OptimizerCap {
                    count: set.len() as u128,
                    cap: cfg.optimizer_cap,
                });
            }
        }
    }
    let mut v: Vec<Vertex> = set.into_iter().collect();
    v.sort();
    Ok((best, v))
}

/// All distinct correlation vectors of optimal strategies, sorted.
pub fn collect_vertices(core: &CorrelationCore, cfg: &LhvConfig) -> Result<Vec<Vertex>> {
    Ok(collect_vertices_with_value(core, cfg)?.1)
}

const P61: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn to_mod(v: i8, p: u64) -> u64 {
    match v {
        1 => 1,
        -1 => p - 1,
        _ => 0,
    }
}

/// Row echelon basis modulo `p`: each row is normalised to `1` at its pivot
/// and vanishes at the pivots of earlier rows.
struct ModBasis {
    p: u64,
    d: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl ModBasis {
    fn new(p: u64, d: usize) -> Self {
        ModBasis {
            p,
            d,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Insert `v` if it is independent of the basis; returns whether it was.
    fn insert(&mut self, v: &[i8]) -> bool {
        let p = self.p;
        let mut w: Vec<u64> = v.iter().map(|&x| to_mod(x, p)).collect();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let f = w[piv];
            if f == 0 {
                continue;
            }
            for (wc, &rc) in w.iter_mut().zip(row).skip(piv) {
                if rc != 0 {
                    *wc = (*wc + p - mul_mod(f, rc, p)) % p;
                }
            }
        }
        let Some(piv) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(w[piv], p);
        for wc in w.iter_mut() {
            *wc = mul_mod(*wc, inv, p);
        }
        self.rows.push(w);
        self.pivots.push(piv);
        true
    }

    /// Basis of the right kernel, one vector per non-pivot column.
    fn kernel(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        // Reduced form: clear every pivot column above and below its pivot.
        let mut order: Vec<usize> = (0..self.rank()).collect();
        order.sort_by_key(|&i| self.pivots[i]);
        let mut rows: Vec<Vec<u64>> = order.iter().map(|&i| self.rows[i].clone()).collect();
        let pivots: Vec<usize> = order.iter().map(|&i| self.pivots[i]).collect();
        for i in (0..rows.len()).rev() {
            let pc = pivots[i];
            let (upper, lower) = rows.split_at_mut(i);
            let pivot_row = &lower[0];
            for r in upper.iter_mut() {
                let f = r[pc];
                if f == 0 {
                    continue;
                }
                for (rc, &pr) in r.iter_mut().zip(pivot_row).skip(pc) {
                    if pr != 0 {
                        *rc = (*rc + p - mul_mod(f, pr, p)) % p;
                    }
                }
            }
        }
        let is_pivot: HashSet<usize> = pivots.iter().copied().collect();
        (0..self.d)
            .filter(|c| !is_pivot.contains(c))
            .map(|f| {
                let mut x = vec![0u64; self.d];
                x[f] = 1;
                for (row, &pc) in rows.iter().zip(&pivots) {
                    x[pc] = (p - row[f]) % p;
                }
                x
            })
            .collect()
    }
}

/// Smallest `n / d` with `n = a d mod p` and `|n|, d <= sqrt(p / 2)`.
fn rational_reconstruct(a: u64, p: u64) -> Option<(i128, i128)> {
    let bound = ((p / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (n, d) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    Some((n, d))
}

/// Integer vector proportional to a modular kernel vector, if reconstructible.
fn lift(x: &[u64], p: u64) -> Option<Vec<i128>> {
    let fracs: Vec<(i128, i128)> = x
        .iter()
        .map(|&v| rational_reconstruct(v, p))
        .collect::<Option<_>>()?;
    let l = fracs.iter().try_fold(1i128, |acc, &(_, d)| {
        let g = acc.gcd(&d);
        acc.checked_mul(d / g)
    })?;
    fracs
        .iter()
        .map(|&(n, d)| n.checked_mul(l / d))
        .collect::<Option<_>>()
}

fn orthogonal(x: &[i128], v: &[i8]) -> bool {
    let mut acc: i128 = 0;
    for (&xc, &vc) in x.iter().zip(v) {
        match vc {
            1 => acc += xc,
            -1 => acc -= xc,
            _ => {}
        }
    }
    acc == 0
}

enum Certificate {
    /// Rank proven equal to the current modular rank.
    Proven,
    /// The difference at this index is not orthogonal to a lifted kernel vector.
    Witness(usize),
    /// Reconstruction failed.
    Unavailable,
}

fn certify(basis: &ModBasis, diffs: &[Vec<i8>]) -> Certificate {
    let kernel: Option<Vec<Vec<i128>>> = basis.kernel().iter().map(|x| lift(x, basis.p)).collect();
    let Some(kernel) = kernel else {
        return Certificate::Unavailable;
    };
    // Lifted vectors have the identity pattern on the free columns, so they
    // stay linearly independent over the rationals.
    for (i, v) in diffs.iter().enumerate() {
        if !kernel.iter().all(|x| orthogonal(x, v)) {
            return Certificate::Witness(i);
        }
    }
    Certificate::Proven
}

fn differences(vertices: &[Vertex]) -> Vec<Vec<i8>> {
    let base = &vertices[0];
    vertices[1..].iter().map(|v| v.half_difference(base)).collect()
}

/// Rank over the rationals of `{v_i - v_0}`.
pub fn affine_rank(vertices: &[Vertex]) -> Result<usize> {
    check_vertices(vertices)?;
    let diffs = differences(vertices);
    let d = vertices[0].dim();
    let mut basis = ModBasis::new(P61, d);
    let mut stall = 0usize;
    let mut patience = 32usize;
    let mut i = 0;
    while i < diffs.len() {
        if basis.rank() == d {
            return Ok(d);
        }
        if basis.insert(&diffs[i]) {
            stall = 0;
        } else {
            stall += 1;
        }
        i += 1;
        if stall >= patience || i == diffs.len() {
            match certify(&basis, &diffs) {
                Certificate::Proven => return Ok(basis.rank()),
                Certificate::Witness(j) => {
                    if !basis.insert(&diffs[j]) {
                        // Independent over the rationals but not modulo p.
                        return affine_rank_exact(vertices);
                    }
                }
                Certificate::Unavailable => {
                    if i == diffs.len() {
                        return affine_rank_exact(vertices);
                    }
                }
            }
            stall = 0;
            patience *= 2;
        }
    }
    match certify(&basis, &diffs) {
        Certificate::Proven => Ok(basis.rank()),
        _ => affine_rank_exact(vertices),
    }
}

/// Rank of `{v_i - v_0}` modulo the prime `p` (a lower bound on the rational rank).
pub fn affine_rank_mod(vertices: &[Vertex], p: u64) -> Result<usize> {
    check_vertices(vertices)?;
    if p < 3 || !(2..).take_while(|k: &u64| k * k <= p).all(|k| p % k != 0) {
        return Err(Error::Invalid(format!("{p} is not an odd prime")));
    }
    let mut basis = ModBasis::new(p, vertices[0].dim());
    for v in differences(vertices) {
        basis.insert(&v);
    }
    Ok(basis.rank())
}

/// Rank of `{v_i - v_0}` by fraction-free elimination over the integers,
/// dividing every new row by the gcd of its entries.
pub fn affine_rank_exact(vertices: &[Vertex]) -> Result<usize> {
    check_vertices(vertices)?;
    let mut rows: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for v in differences(vertices) {
        let mut w: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for (piv, row) in &rows {
            if w[*piv].is_zero() {
                continue;
            }
            let f = w[*piv].clone();
            let r = &row[*piv];
            for (wc, rc) in w.iter_mut().zip(row) {
                *wc = &*wc * r - &f * rc;
            }
            let g = w.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if !g.is_zero() && g != BigInt::from(1) {
                for wc in w.iter_mut() {
                    *wc = &*wc / &g;
                }
            }
        }
        if let Some(piv) = w.iter().position(|x| !x.is_zero()) {
            rows.push((piv, w));
        }
    }
    Ok(rows.len())
}

fn check_vertices(vertices: &[Vertex]) -> Result<()> {
    let first = vertices
        .first()
        .ok_or_else(|| Error::Invalid("affine rank of an empty vertex set".into()))?;
    if vertices.iter().any(|v| v.m != first.m) {
        return Err(Error::Dimension("vertices of different sizes".into()));
    }
    Ok(())
}

/// One row of a tightness study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TightnessReport {
    pub m: usize,
    pub lhv_value: Real,
    pub vertex_count: usize,
    /// Optimal strategy pairs; each vertex comes from exactly two.
    pub strategy_pairs: usize,
    pub affine_rank: usize,
    pub tight: bool,
    pub regular_equivalent: bool,
}

/// Vertices, affine rank and facet verdict of a two-outcome correlation core.
pub fn tightness_report(core: &CorrelationCore, cfg: &LhvConfig) -> Result<TightnessReport> {
    let m = core.m();
    let (best, vertices) = collect_vertices_with_value(core, cfg)?;
    let rank = affine_rank(&vertices)?;
    let value = BigRational::from_integer(BigInt::from(best)) * core.scale();
    let regular = value.is_integer() && {
        let c = value.to_integer();
        &c * &c == BigInt::from(m).pow(3)
    };
    Ok(TightnessReport {
        m,
        lhv_value: Real::Exact(value),
        vertex_count: vertices.len(),
        strategy_pairs: 2 * vertices.len(),
        affine_rank: rank,
        tight: rank + 1 == m * m,
        regular_equivalent: regular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{circulant, sylvester};

    fn cfg() -> LhvConfig {
        LhvConfig::default()
    }

    #[test]
    fn chsh_vertices() {
        let v = collect_vertices(&sylvester(1).to_core(), &cfg()).unwrap();
        let signs: HashSet<Vec<i8>> = v.iter().map(Vertex::signs).collect();
        let want: HashSet<Vec<i8>> = [
            vec![1, 1, 1, 1],
            vec![1, -1, 1, -1],
            vec![1, 1, -1, -1],
            vec![-1, 1, 1, -1],
        ]
        .into_iter()
        .collect();
        assert_eq!(signs, want);
        assert_eq!(affine_rank(&v).unwrap(), 3);
        assert_eq!(affine_rank_exact(&v).unwrap(), 3);
    }

    #[test]
    fn small_reports() {
        let r = tightness_report(&circulant(&[-1, 1, 1, 1]).unwrap().to_core(), &cfg()).unwrap();
        assert_eq!((r.vertex_count, r.affine_rank, r.tight, r.regular_equivalent), (4, 3, false, true));
        let r = tightness_report(&sylvester(3).to_core(), &cfg()).unwrap();
        assert_eq!((r.vertex_count, r.affine_rank, r.tight, r.regular_equivalent), (64, 63, true, false));
        assert_eq!(r.lhv_value, Real::Exact(BigRational::from_integer(20.into())));
    }

    #[test]
    fn single_vertex_has_rank_zero() {
        let v = vec![Vertex::from_masks(3, 0b010, 0b001)];
        assert_eq!(affine_rank(&v).unwrap(), 0);
        assert!(affine_rank(&[]).is_err());
    }

    #[test]
    fn modular_and_exact_ranks_agree() {
        for k in 1..=3 {
            let v = collect_vertices(&sylvester(k).to_core(), &cfg()).unwrap();
            let exact = affine_rank_exact(&v).unwrap();
            assert_eq!(affine_rank(&v).unwrap(), exact);
            assert_eq!(affine_rank_mod(&v, 2147483647).unwrap(), exact);
            assert_eq!(affine_rank_mod(&v, 2147483629).unwrap(), exact);
        }
    }

    #[test]
    fn vertex_bits() {
        let v = Vertex::from_masks(2, 0b01, 0b10);
        // a = (-, +), b = (+, -).
        assert_eq!(v.signs(), vec![-1, 1, 1, -1]);
        assert_eq!(v.entry(0, 0), -1);
    }

    #[test]
    fn reconstruction() {
        let p = P61;
        let a = mul_mod(p - 3, inv_mod(7, p), p);
        assert_eq!(rational_reconstruct(a, p), Some((-3, 7)));
        assert_eq!(rational_reconstruct(5, p), Some((5, 1)));
    }

    #[test]
    fn certificate_on_random_sets() {
        // Arbitrary sign vectors: the certified rank must match exact elimination.
        let m = 4;
        let mut vs = Vec::new();
        let mut state = 12345u64;
        for n in 0..40 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (state >> 33) & 0b1110;
            let b = (state >> 45) & 0b1111;
            vs.push(Vertex::from_masks(m, a, b));
            if n % 5 == 0 {
                let mut set = vs.clone();
                set.sort();
                set.dedup();
                assert_eq!(affine_rank(&set).unwrap(), affine_rank_exact(&set).unwrap());
            }
        }
    }
}
