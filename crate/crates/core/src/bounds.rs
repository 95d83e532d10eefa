//! Upper and lower bounds on the excess and the LHV value: Best's bounds for
//! Hadamard matrices, the numerical-radius, row-sum and spectral bounds, the
//! closed-form excess of three Hadamard families, and the value of a Bell
//! operator built from fixed observables.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::constructions::SignMatrix;
use crate::error::{Error, Result};
use crate::game::{validate_symmetry, GameMatrix};
use crate::scalar::{root_of_unity, Real, DEFAULT_TOL};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "order {n} needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(CMatrix { n, data })
    }

    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::new(n, data.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::one();
        }
        CMatrix { n, data }
    }

    pub fn diag(d: &[Complex64]) -> Self {
        let n = d.len();
        let mut m = CMatrix::new(n, vec![Complex64::zero(); n * n]).expect("square");
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        CMatrix {
            n,
            data: (0..n * n).map(|k| self.data[(k % n) * n + k / n].conj()).collect(),
        }
    }

    pub fn mul(&self, o: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut data = vec![Complex64::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        CMatrix { n, data }
    }

    pub fn add(&self, o: &CMatrix) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn kron(&self, o: &CMatrix) -> CMatrix {
        let (a, b) = (self.n, o.n);
        let n = a * b;
        let mut data = vec![Complex64::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.get(i / b, j / b) * o.get(i % b, j % b);
            }
        }
        CMatrix { n, data }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn distance(&self, o: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `||A - A^dagger||_F`.
    pub fn hermitian_defect(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    /// Whether `A A^dagger = A^dagger A` within `tol ||A||_F^2`.
    pub fn is_normal(&self, tol: f64) -> bool {
        let a = self.adjoint();
        let f = self.frobenius();
        self.mul(&a).distance(&a.mul(self)) <= tol * (1.0 + f * f)
    }

    pub fn pow(&self, k: usize) -> CMatrix {
        (0..k).fold(CMatrix::identity(self.n), |acc, _| acc.mul(self))
    }

    pub fn row_sums(&self) -> Vec<Complex64> {
        self.data.chunks(self.n).map(|r| r.iter().sum()).collect()
    }

    pub fn total(&self) -> Complex64 {
        self.data.iter().sum()
    }
}

impl From<&GameMatrix> for CMatrix {
    fn from(m: &GameMatrix) -> Self {
        CMatrix {
            n: m.order(),
            data: m.to_c64_vec(),
        }
    }
}

impl From<&SignMatrix> for CMatrix {
    fn from(m: &SignMatrix) -> Self {
        CMatrix {
            n: m.order(),
            data: m.data().iter().map(|&v| Complex64::new(v as f64, 0.0)).collect(),
        }
    }
}

/// Eigenvalues of a Hermitian matrix in increasing order, by cyclic complex
/// Jacobi rotations until the off-diagonal norm is below `1e-12 ||H||_F`.
pub fn hermitian_eigen(h: &CMatrix) -> Result<Vec<f64>> {
    let n = h.n;
    let norm = h.frobenius();
    let defect = h.hermitian_defect();
    if defect > 1e-9 * (1.0 + norm) {
        return Err(Error::NotHermitian(defect));
    }
    let mut a = h.data.clone();
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
    }
    let target = 1e-12 * norm;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                // Phase e^{-i phi} on column q makes the pivot real, then a
                // real rotation annihilates it.
                let ph = apq / r;
                let (app, aqq) = (a[p * n + p].re, a[q * n + q].re);
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phc = ph.conj();
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = akp * c - akq * phc * s;
                    a[k * n + q] = akp * s + akq * phc * c;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = apk * c - aqk * ph * s;
                    a[q * n + k] = apk * s + aqk * ph * c;
                }
                a[p * n + q] = Complex64::zero();
                a[q * n + p] = Complex64::zero();
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

fn lambda_max(h: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigen(h)?.last().copied().unwrap_or(0.0))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    let g = m.mul(&m.adjoint());
    // M M^dagger is Hermitian up to rounding; symmetrise before solving.
    let g = g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0));
    lambda_max(&g).expect("Gram matrix is Hermitian").max(0.0).sqrt()
}

/// Spectral radius, available for normal matrices only (where it equals
/// the spectral norm).
pub fn spectral_radius(m: &CMatrix) -> Option<f64> {
    m.is_normal(1e-9).then(|| spectral_norm(m))
}

/// `lambda_max((e^{i t} M + e^{-i t} M^dagger) / 2)`.
fn rotated_top(m: &CMatrix, adj: &CMatrix, theta: f64) -> f64 {
    let e = Complex64::from_polar(0.5, theta);
    let h = m.scale(e).add(&adj.scale(e.conj()));
    lambda_max(&h).expect("Hermitian by construction")
}

/// Numerical radius `max_{|psi| = 1} |<psi|M|psi>|`.
///
/// Normal matrices use `r = sigma`. Otherwise the rotated Hermitian part is
/// scanned on 720 angles, the best bracket is refined by golden-section
/// search to `tol`, and the angle aligning the all-ones vector is evaluated
/// too, so the result is never below `|sum(M)| / n`.
pub fn numerical_radius(m: &CMatrix, tol: f64) -> f64 {
    let n = m.n;
    if n == 0 {
        return 0.0;
    }
    let floor = m.total().norm() / n as f64;
    if m.is_normal(1e-9) {
        return spectral_norm(m).max(floor);
    }
    let adj = m.adjoint();
    const GRID: usize = 720;
    let step = 2.0 * PI / GRID as f64;
    let (mut best_k, mut best) = (0, f64::MIN);
    for k in 0..GRID {
        let v = rotated_top(m, &adj, k as f64 * step);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let (mut lo, mut hi) = ((best_k as f64 - 1.0) * step, (best_k as f64 + 1.0) * step);
    let tol = if tol > 0.0 { tol } else { 1e-6 };
    let mut c = hi - (hi - lo) / phi;
    let mut d = lo + (hi - lo) / phi;
    let (mut fc, mut fd) = (rotated_top(m, &adj, c), rotated_top(m, &adj, d));
    while hi - lo > tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - (hi - lo) / phi;
            fc = rotated_top(m, &adj, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + (hi - lo) / phi;
            fd = rotated_top(m, &adj, d);
        }
    }
    best = best.max(fc).max(fd);
    let total = m.total();
    if total.norm() > 0.0 {
        best = best.max(rotated_top(m, &adj, -total.arg()));
    }
    debug_assert!(best >= floor - 1e-9 * (1.0 + floor));
    best.max(floor)
}

/// `nu(M) = sqrt(sum_i |sum_j M_ij|^2)`.
pub fn nu(m: &CMatrix) -> f64 {
    m.row_sums().iter().map(|s| s.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NuSaturation {
    pub saturated: bool,
    /// Common row sum (real part; complex sums are reported through `gamma_im`).
    pub gamma: Option<f64>,
    pub gamma_im: Option<f64>,
}

/// The bound `sqrt(n) nu(M)` is attained exactly for constant row sums.
pub fn nu_saturated(m: &CMatrix, tol: f64) -> NuSaturation {
    let sums = m.row_sums();
    let first = sums.first().copied().unwrap_or_default();
    let saturated = !sums.is_empty() && sums.iter().all(|s| (s - first).norm() <= tol);
    if saturated {
        let n = m.n as f64;
        debug_assert!((n.sqrt() * nu(m) - n * first.norm()).abs() <= 1e-9 * (1.0 + n * first.norm()));
    }
    NuSaturation {
        saturated,
        gamma: saturated.then_some(first.re),
        gamma_im: saturated.then_some(first.im),
    }
}

/// Best's bounds for a Hadamard matrix of even order `n`:
/// `n^2 2^-n C(n, n/2) <= excess <= n^(3/2)`.
///
/// The lower bound is exact up to `n = 512` and computed in logarithms
/// beyond; the upper bound is exact when `n` is a perfect square.
pub fn best_bounds(n: u64) -> Result<(Real, Real)> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Invalid(format!("Best bounds need a positive even order, got {n}")));
    }
    let lower = if n <= 512 {
        let mut binom = BigInt::one();
        for k in 0..n / 2 {
            binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
        }
        let num = binom * BigInt::from(n * n);
        Real::Exact(BigRational::new(num, BigInt::one() << n as usize))
    } else {
        let h = n / 2;
        let log_binom: f64 = (1..=h).map(|k| ((h + k) as f64 / k as f64).ln()).sum();
        Real::Float((2.0 * (n as f64).ln() - n as f64 * 2f64.ln() + log_binom).exp())
    };
    let r = n.sqrt();
    let upper = if r * r == n {
        Real::Exact(BigRational::from_integer(BigInt::from(n * r)))
    } else {
        Real::Float((n as f64).powf(1.5))
    };
    Ok((lower, upper))
}

/// Every bound computed on one matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub excess: f64,
    pub best_lower: Option<Real>,
    pub best_upper: Option<Real>,
    /// `r(M)`.
    pub numerical_radius: f64,
    /// `n r(M)`.
    pub radius_bound: f64,
    pub nu: f64,
    /// `sqrt(n) nu(M)`.
    pub nu_bound: f64,
    pub sigma: f64,
    /// `n sigma(M)`.
    pub sigma_bound: f64,
    /// Available for normal matrices only.
    pub rho: Option<f64>,
    pub saturated: bool,
    /// Signed common row sum when saturated.
    pub gamma: Option<f64>,
    /// `n |gamma|` when saturated.
    pub gamma_bound: Option<f64>,
    /// Whether the caller normalised the matrix to its all-plus optimum.
    pub normalized: bool,
}

/// Compute the bound chain for `m`. Best's bounds are included when
/// `hadamard` is set and the order is even.
pub fn bounds_report(m: &CMatrix, hadamard: bool, normalized: bool, tol: f64) -> BoundsReport {
    let n = m.n;
    let nf = n as f64;
    let sigma = spectral_norm(m);
    let r = numerical_radius(m, 1e-6);
    let v = nu(m);
    let sat = nu_saturated(m, if tol > 0.0 { tol } else { DEFAULT_TOL });
    let (best_lower, best_upper) = match (hadamard, best_bounds(n as u64)) {
        (true, Ok((l, u))) => (Some(l), Some(u)),
        _ => (None, None),
    };
    BoundsReport {
        n,
        excess: m.total().re,
        best_lower,
        best_upper,
        numerical_radius: r,
        radius_bound: nf * r,
        nu: v,
        nu_bound: nf.sqrt() * v,
        sigma,
        sigma_bound: nf * sigma,
        rho: spectral_radius(m),
        saturated: sat.saturated,
        gamma: sat.gamma,
        gamma_bound: sat.gamma.map(|g| nf * g.abs()),
        normalized,
    }
}

/// Largest eigenvalue of `sum M[m s + x][m t + y] A_x^s (x) B_y^t`.
///
/// Every observable must be unitary with `U^q = I`.
pub fn quantum_witness(game: &GameMatrix, alice: &[CMatrix], bob: &[CMatrix]) -> Result<f64> {
    let (m, q) = (game.m(), game.q());
    validate_symmetry(game, game.tol().max(if game.is_exact() { 0.0 } else { DEFAULT_TOL }))?;
    if alice.len() != m || bob.len() != m {
        return Err(Error::Dimension(format!(
            "need {m} observables per party, got {} and {}",
            alice.len(),
            bob.len()
        )));
    }
    for (set, offset) in [(alice, 0), (bob, m)] {
        let d = set[0].n;
        for (i, u) in set.iter().enumerate() {
            if u.n != d {
                return Err(Error::Dimension("observables of one party differ in dimension".into()));
            }
            let unitary = u.mul(&u.adjoint()).distance(&CMatrix::identity(d)) <= 1e-9 * d as f64;
            let cyclic = u.pow(q).distance(&CMatrix::identity(d)) <= 1e-9 * d as f64;
            if !unitary || !cyclic {
                return Err(Error::Observable { index: offset + i, q });
            }
        }
    }
    let powers = |set: &[CMatrix]| -> Vec<Vec<CMatrix>> {
        set.iter().map(|u| (0..q).map(|s| u.pow(s)).collect()).collect()
    };
    let (pa, pb) = (powers(alice), powers(bob));
    let (da, db) = (alice[0].n, bob[0].n);
    let mut w = CMatrix::new(da * db, vec![Complex64::zero(); da * db * da * db])?;
    let n = game.order();
    for i in 0..n {
        for j in 0..n {
            let c = game.entry_c64(i, j);
            if c == Complex64::zero() {
                continue;
            }
            let term = pa[i % m][i / m].kron(&pb[j % m][j / m]).scale(c);
            w = w.add(&term);
        }
    }
    let defect = w.hermitian_defect();
    if defect > 1e-9 * (1.0 + w.frobenius()) {
        return Err(Error::NotHermitian(defect));
    }
    let w = w.add(&w.adjoint()).scale(Complex64::new(0.5, 0.0));
    lambda_max(&w)
}

/// `U D U^dagger` with `U` the rotation by `alpha` and `D = diag(1, -1)`.
pub fn rotated_observable(alpha: f64) -> CMatrix {
    let (c, s) = (alpha.cos(), alpha.sin());
    let u = CMatrix::from_real(2, &[c, -s, s, c]).expect("2x2");
    let d = CMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2");
    u.mul(&d).mul(&u.adjoint())
}

/// Qubit observables reaching `3 sqrt 3` on the game with core `circ(0, -1, 1)`.
pub fn circulant3_observables() -> (Vec<CMatrix>, Vec<CMatrix>) {
    let a = [0.0, 2.0 * PI / 3.0, PI / 3.0];
    let b = [PI / 4.0, 7.0 * PI / 12.0, 11.0 * PI / 12.0];
    (
        a.iter().map(|&t| rotated_observable(t)).collect(),
        b.iter().map(|&t| rotated_observable(t)).collect(),
    )
}

/// `A = (Z, X)`, `B = ((Z + X)/sqrt 2, (Z - X)/sqrt 2)`.
pub fn chsh_observables() -> (Vec<CMatrix>, Vec<CMatrix>) {
    let z = CMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2");
    let x = CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2");
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let plus = z.add(&x).scale(h);
    let minus = z.add(&x.scale(Complex64::new(-1.0, 0.0))).scale(h);
    (vec![z, x], vec![plus, minus])
}

/// Diagonal observable `diag(w^e_0, w^e_1, ...)`.
pub fn diagonal_observable(q: usize, exponents: &[usize]) -> CMatrix {
    CMatrix::diag(&exponents.iter().map(|&e| root_of_unity(q, e)).collect::<Vec<_>>())
}

/// Order `4k(k-1)` and excess `4(k-1)^2(2k+1)` of the family with `k` even.
pub fn jkks_excess(k: u64) -> Result<(u64, u64)> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::Invalid(format!("k must be an even integer >= 2, got {k}")));
    }
    Ok((4 * k * (k - 1), 4 * (k - 1) * (k - 1) * (2 * k + 1)))
}

/// Upper bound on the excess of a conference-derived matrix of order `n`:
/// `n (k^2 + 2k + n - 1) / (2(k + 1))` with `k` the largest odd integer
/// not above `sqrt(n - 1)`.
pub fn conference_excess_bound(n: u64) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::Invalid(format!("order must be at least 2, got {n}")));
    }
    let mut k = (n - 1).sqrt();
    if k % 2 == 0 {
        k -= 1;
    }
    Ok(BigRational::new(
        BigInt::from(n * (k * k + 2 * k + n - 1)),
        BigInt::from(2 * (k + 1)),
    ))
}

fn is_prime_power(l: u64) -> bool {
    if l < 2 {
        return false;
    }
    let p = (2..).find(|d| l % d == 0).expect("l >= 2 has a factor");
    let mut r = l;
    while r % p == 0 {
        r /= p;
    }
    r == 1
}

/// Parameters and maximal excess of the quadratic-residue Hadamard matrix of
/// order `l + 1`, for `l = (2j + 1)^2 + 2` a prime power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hs18 {
    pub order: u64,
    pub k: u64,
    pub t: u64,
    pub s: u64,
    pub excess: u64,
}

pub fn hs18_excess(l: u64) -> Result<Hs18> {
    let odd = l.checked_sub(2).map(|v| v.sqrt()).filter(|r| r * r + 2 == l && r % 2 == 1);
    if odd.is_none() || !is_prime_power(l) {
        return Err(Error::Invalid(format!("{l} is not a prime power of the form (2j+1)^2 + 2")));
    }
    let n = l + 1;
    let mut k = n.sqrt();
    if k % 2 == 1 {
        k -= 1;
    }
    let closer = (n as i64 - (k * k) as i64).abs() < (n as i64 - ((k + 2) * (k + 2)) as i64).abs();
    // t = k - 2 may be 0; the formula stays finite.
    let t = if closer { k } else { k - 2 };
    let s = n * ((t + 4) * (t + 4) - n) / (8 * t + 16);
    Ok(Hs18 {
        order: n,
        k,
        t,
        s,
        excess: n * (t + 4) - 4 * s,
    })
}
