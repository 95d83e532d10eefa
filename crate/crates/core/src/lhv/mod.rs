//! Local-hidden-variable values by exhaustive enumeration.
//!
//! `C(M) = max sum M[m s + x][m t + y] a_x^s b_y^t` over `a_x, b_y` in the
//! `q`-th roots of unity. Alice's `q^m` assignments are enumerated and Bob
//! answers each setting optimally. Two- and four-outcome games with exact
//! entries are solved in Gaussian integers; other games in double precision
//! with a relative tie tolerance.

mod correlation;
mod kernel;
mod strategy;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::game::{
    core_of, is_correlation_matrix, validate_symmetry, CorrelationCore, Entries, GameMatrix,
};
use crate::scalar::{exact_outcomes, exact_root, rat_to_f64, root_of_unity, ExactComplex, Real, DEFAULT_TOL};

pub(crate) use correlation::CorrelationScan;
use kernel::{par_chunks, Arith, Float, Gauss, Kernel};
pub use strategy::Strategy;

/// Limits and numerical settings for the solver.
#[derive(Clone, Debug)]
pub struct LhvConfig {
    /// Worker threads; `0` uses every available core.
    pub threads: usize,
    /// Largest number of Alice assignments the solver will enumerate.
    pub budget: u128,
    /// Largest number of optimal strategies that will be materialised.
    pub optimizer_cap: u128,
    /// Relative tolerance deciding ties in float games.
    pub tie_tol: f64,
    /// Use the sign-vector scan for two-outcome correlation games.
    pub fast_path: bool,
}

impl Default for LhvConfig {
    fn default() -> Self {
        LhvConfig {
            threads: 0,
            budget: 1 << 26,
            optimizer_cap: 1 << 22,
            tie_tol: 1e-7,
            fast_path: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LhvResult {
    pub value: Real,
    pub witness: Strategy,
    pub optimizer_count: Option<u128>,
}

/// Value of the Bell expression for a deterministic strategy.
pub fn evaluate(mat: &GameMatrix, s: &Strategy) -> Result<Real> {
    let (m, q) = (mat.m(), mat.q());
    if s.m() != m || s.q() != q {
        return Err(Error::Dimension(format!(
            "strategy for m={}, q={} applied to a game with m={m}, q={q}",
            s.m(),
            s.q()
        )));
    }
    let n = m * q;
    let alpha = s.alice_exponents();
    let beta = s.bob_exponents();
    let phase = |i: usize, j: usize| (i / m) * alpha[i % m] + (j / m) * beta[j % m];
    match mat.entries() {
        Entries::Exact(d) if exact_outcomes(q) => {
            let mut acc = ExactComplex::zero();
            for i in 0..n {
                for j in 0..n {
                    let z = &d[i * n + j];
                    if !z.is_zero() {
                        acc = &acc + &(&exact_root(q, phase(i, j)).expect("exact") * z);
                    }
                }
            }
            if !acc.is_real() {
                return Err(Error::NonReal(rat_to_f64(&acc.im)));
            }
            Ok(Real::Exact(acc.re))
        }
        _ => {
            let mut acc = Complex64::zero();
            for i in 0..n {
                for j in 0..n {
                    acc += mat.entry_c64(i, j) * root_of_unity(q, phase(i, j));
                }
            }
            if acc.im.abs() > DEFAULT_TOL * (n * n) as f64 {
                return Err(Error::NonReal(acc.im));
            }
            Ok(Real::Float(acc.re))
        }
    }
}

enum Prepared {
    Exact(Kernel<Gauss>, BigInt),
    Float(Kernel<Float>),
}

fn check_budget(m: usize, q: usize, cfg: &LhvConfig) -> Result<()> {
    let states = (0..m).fold(1u128, |acc, _| acc.saturating_mul(q as u128));
    if states > cfg.budget || states > u64::MAX as u128 {
        return Err(Error::Budget {
            required: states,
            budget: cfg.budget,
        });
    }
    Ok(())
}

/// Common denominator and Gaussian-integer numerators of exact entries.
fn gaussian_numerators(d: &[ExactComplex]) -> Result<(BigInt, Vec<Complex<i64>>)> {
    let lcm = d
        .iter()
        .fold(BigInt::one(), |acc, z| acc.lcm(z.re.denom()).lcm(z.im.denom()));
    let l = BigRational::from_integer(lcm.clone());
    let mut total: i128 = 0;
    let mut out = Vec::with_capacity(d.len());
    for z in d {
        let re = (&z.re * &l).to_integer().to_i64();
        let im = (&z.im * &l).to_integer().to_i64();
        match (re, im) {
            (Some(re), Some(im)) => {
                total += re.unsigned_abs() as i128 + im.unsigned_abs() as i128;
                out.push(Complex::new(re, im));
            }
            _ => return Err(Error::Overflow("entry numerator exceeds 64 bits".into())),
        }
    }
    if total >= 1 << 60 {
        return Err(Error::Overflow("sum of entry numerators exceeds 2^60".into()));
    }
    Ok((lcm, out))
}

fn prepare(mat: &GameMatrix, cfg: &LhvConfig) -> Result<Prepared> {
    validate_symmetry(mat, mat.tol().max(if mat.is_exact() { 0.0 } else { DEFAULT_TOL }))?;
    let (m, q) = (mat.m(), mat.q());
    check_budget(m, q, cfg)?;
    match mat.entries() {
        Entries::Exact(d) if q == 2 || q == 4 => {
            let (l, k) = gaussian_numerators(d)?;
            Ok(Prepared::Exact(Kernel::new(Gauss::new(q), m, q, k), l))
        }
        _ => Ok(Prepared::Float(Kernel::new(
            Float::new(q, cfg.tie_tol),
            m,
            q,
            mat.to_c64_vec(),
        ))),
    }
}

fn total_states<A: Arith>(ker: &Kernel<A>) -> u64 {
    ker.alice_states() as u64
}

/// Maximum over Alice's assignments with the first maximising assignment.
fn maximise<A: Arith>(ker: &Kernel<A>, threads: usize) -> Result<(A::R, Vec<usize>)> {
    let parts = par_chunks(total_states(ker), threads, |lo, hi| {
        let mut best: Option<(A::R, Vec<usize>)> = None;
        ker.walk(lo, hi, |alpha, g| {
            let v = ker.value(g);
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, alpha.to_vec()));
            }
        });
        best
    })?;
    let mut best: Option<(A::R, Vec<usize>)> = None;
    for (v, alpha) in parts.into_iter().flatten() {
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, alpha));
        }
    }
    Ok(best.expect("at least one state"))
}

fn witness<A: Arith>(ker: &Kernel<A>, alpha: &[usize]) -> Result<Strategy> {
    let mut g = None;
    // A fresh state for this single assignment.
    let digits = digits_of_gray(alpha, ker.q());
    ker.walk(digits, digits + 1, |_, state| g = Some(state.to_vec()));
    let g = g.expect("one state");
    let beta: Vec<usize> = (0..ker.m()).map(|y| ker.bob_best(&g, y).1).collect();
    Strategy::new(ker.q(), alpha, &beta)
}

/// Counter value whose Gray code is `alpha` (inverse of `g_j = d_j - d_{j+1}`).
fn digits_of_gray(alpha: &[usize], q: usize) -> u64 {
    let mut d = vec![0usize; alpha.len()];
    let mut next = 0;
    for j in (0..alpha.len()).rev() {
        d[j] = (alpha[j] + next) % q;
        next = d[j];
    }
    d.iter().rev().fold(0u64, |acc, &x| acc * q as u64 + x as u64)
}

fn count_optimal<A: Arith>(ker: &Kernel<A>, best: A::R, threads: usize) -> Result<u128> {
    let parts = par_chunks(total_states(ker), threads, |lo, hi| {
        let mut count = 0u128;
        ker.walk(lo, hi, |_, g| {
            if ker.arith.ties(best, ker.value(g)) {
                let ways = (0..ker.m()).fold(1u128, |acc, y| {
                    acc.saturating_mul(ker.bob_ties(g, y).len() as u128)
                });
                count = count.saturating_add(ways);
            }
        });
        count
    })?;
    Ok(parts.into_iter().fold(0u128, u128::saturating_add))
}

fn collect_optimal<A: Arith>(ker: &Kernel<A>, best: A::R, threads: usize) -> Result<Vec<Strategy>> {
    let q = ker.q();
    let parts = par_chunks(total_states(ker), threads, |lo, hi| {
        let mut out = Vec::new();
        ker.walk(lo, hi, |alpha, g| {
            if !ker.arith.ties(best, ker.value(g)) {
                return;
            }
            let options: Vec<Vec<usize>> = (0..ker.m()).map(|y| ker.bob_ties(g, y)).collect();
            for beta in cartesian(&options) {
                out.push(Strategy::new(q, alpha, &beta).expect("valid exponents"));
            }
        });
        out
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Lexicographic product of per-setting option lists.
fn cartesian(options: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(options.len())];
    for opts in options {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&o| {
                    let mut p = prefix.clone();
                    p.push(o);
                    p
                })
            })
            .collect();
    }
    out
}

fn two_outcome_core(mat: &GameMatrix, cfg: &LhvConfig) -> Option<CorrelationCore> {
    if !cfg.fast_path || mat.q() != 2 || !mat.is_exact() || !is_correlation_matrix(mat) {
        return None;
    }
    core_of(mat).ok().filter(|c| c.real_ints().is_some())
}

/// LHV value of a game, with one optimal strategy.
pub fn lhv_value(mat: &GameMatrix, cfg: &LhvConfig) -> Result<LhvResult> {
    if let Some(core) = two_outcome_core(mat, cfg) {
        return correlation_lhv(&core, cfg);
    }
    match prepare(mat, cfg)? {
        Prepared::Exact(ker, l) => {
            let (v, alpha) = maximise(&ker, cfg.threads)?;
            Ok(LhvResult {
                value: Real::Exact(BigRational::new(BigInt::from(v), l)),
                witness: witness(&ker, &alpha)?,
                optimizer_count: None,
            })
        }
        Prepared::Float(ker) => {
            let (v, alpha) = maximise(&ker, cfg.threads)?;
            Ok(LhvResult {
                value: Real::Float(v),
                witness: witness(&ker, &alpha)?,
                optimizer_count: None,
            })
        }
    }
}

/// Number of optimal strategies, without materialising them.
pub fn count_optimizers(mat: &GameMatrix, cfg: &LhvConfig) -> Result<u128> {
    match prepare(mat, cfg)? {
        Prepared::Exact(ker, _) => {
            let (v, _) = maximise(&ker, cfg.threads)?;
            count_optimal(&ker, v, cfg.threads)
        }
        Prepared::Float(ker) => {
            let (v, _) = maximise(&ker, cfg.threads)?;
            count_optimal(&ker, v, cfg.threads)
        }
    }
}

/// Every strategy attaining the LHV value, in enumeration order.
///
/// Ties in exact games are decided exactly; float games use
/// `cfg.tie_tol * (1 + |max|)`. Refuses when more than
/// `cfg.optimizer_cap` strategies would be produced.
pub fn enumerate_optimizers(mat: &GameMatrix, cfg: &LhvConfig) -> Result<Vec<Strategy>> {
    fn run<A: Arith>(ker: &Kernel<A>, cfg: &LhvConfig) -> Result<Vec<Strategy>> {
        let (v, _) = maximise(ker, cfg.threads)?;
        let count = count_optimal(ker, v, cfg.threads)?;
        if count > cfg.optimizer_cap {
            return Err(Error::OptimizerCap {
                count,
                cap: cfg.optimizer_cap,
            });
        }
        collect_optimal(ker, v, cfg.threads)
    }
    match prepare(mat, cfg)? {
        Prepared::Exact(ker, _) => run(&ker, cfg),
        Prepared::Float(ker) => run(&ker, cfg),
    }
}

/// LHV value of a two-outcome correlation game given by its integer core.
pub fn correlation_lhv(core: &CorrelationCore, cfg: &LhvConfig) -> Result<LhvResult> {
    let h = core_ints(core)?;
    let m = core.m();
    let scan = CorrelationScan::new(m, &h, cfg)?;
    let (v, a) = scan.maximum(cfg.threads)?;
    let c = scan.column_sums(a);
    let alice: Vec<usize> = (0..m).map(|x| ((a >> x) & 1) as usize).collect();
    let bob: Vec<usize> = c.iter().map(|&cy| usize::from(cy < 0)).collect();
    Ok(LhvResult {
        value: Real::Exact(BigRational::from_integer(BigInt::from(v)) * core.scale()),
        witness: Strategy::new(2, &alice, &bob)?,
        optimizer_count: None,
    })
}

pub(crate) fn core_ints(core: &CorrelationCore) -> Result<Vec<i64>> {
    if core.q() != 2 {
        return Err(Error::Invalid(format!("expected a two-outcome core, got q={}", core.q())));
    }
    core.real_ints()
        .ok_or_else(|| Error::Invalid("core must have exact real entries".into()))
}

/// Rephase `M` so that the all-plus strategy realises the optimum of `s`:
/// `M'[m s + x][m t + y] = w^(s alpha_x + t beta_y) M[m s + x][m t + y]`,
/// which makes the excess of `M'` the value of `s` on `M`.
///
/// `s` must be optimal for `M`; the excess of the result equals `C(M)`.
pub fn normalize_to_allplus(mat: &GameMatrix, s: &Strategy, cfg: &LhvConfig) -> Result<GameMatrix> {
    let attained = evaluate(mat, s)?;
    let optimum = lhv_value(mat, cfg)?.value;
    let optimal = match (&attained, &optimum) {
        (Real::Exact(a), Real::Exact(b)) => a == b,
        _ => {
            let b = optimum.to_f64();
            (attained.to_f64() - b).abs() <= cfg.tie_tol * (1.0 + b.abs())
        }
    };
    if !optimal {
        return Err(Error::NotOptimal {
            attained: attained.to_string(),
            optimum: optimum.to_string(),
        });
    }
    let out = rephase(mat, s);
    validate_symmetry(&out, out.tol().max(if out.is_exact() { 0.0 } else { DEFAULT_TOL }))?;
    Ok(out)
}

/// Multiply entry `(m s + x, m t + y)` by `w^(s alpha_x + t beta_y)`.
pub(crate) fn rephase(mat: &GameMatrix, s: &Strategy) -> GameMatrix {
    let (m, q) = (mat.m(), mat.q());
    let alpha = s.alice_exponents();
    let beta = s.bob_exponents();
    let back = |i: usize, j: usize| ((i / m) * alpha[i % m] + (j / m) * beta[j % m]) % q;
    if mat.is_exact() && exact_outcomes(q) {
        mat.map_entries(
            |i, j, z| &exact_root(q, back(i, j)).expect("exact") * z,
            |_, _, z| z,
        )
    } else {
        let tol = if mat.is_exact() { DEFAULT_TOL } else { mat.tol() };
        mat.to_float(tol)
            .map_entries(|_, _, z| z.clone(), |i, j, z| z * root_of_unity(q, back(i, j)))
    }
}

/// Kronecker product of two games with the same number of outcomes.
///
/// Row `(m1 s + e) m2 q + f` of the product is row `m s + x` of a game with
/// `m = m1 m2 q` settings, where `x = e m2 q + f`. The second factor must be
/// real for the product to keep the conjugate symmetry.
pub fn tensor_game(m1: &GameMatrix, m2: &GameMatrix) -> Result<GameMatrix> {
    let q = m1.q();
    if m2.q() != q {
        return Err(Error::OutcomeMismatch(q, m2.q()));
    }
    if let Some(pos) = m2.first_complex_entry() {
        return Err(Error::ComplexFactor(pos));
    }
    let (n1, n2) = (m1.order(), m2.order());
    let n = n1 * n2;
    let m = m1.m() * m2.m() * q;
    let idx = |i1: usize, i2: usize| i1 * n2 + i2;
    match (m1.entries(), m2.entries()) {
        (Entries::Exact(a), Entries::Exact(b)) => {
            let mut d = vec![ExactComplex::zero(); n * n];
            for i1 in 0..n1 {
                for j1 in 0..n1 {
                    let x = &a[i1 * n1 + j1];
                    if x.is_zero() {
                        continue;
                    }
                    for i2 in 0..n2 {
                        for j2 in 0..n2 {
                            d[idx(i1, i2) * n + idx(j1, j2)] = x * &b[i2 * n2 + j2];
                        }
                    }
                }
            }
            GameMatrix::from_exact(m, q, d)
        }
        _ => {
            let (a, b) = (m1.to_c64_vec(), m2.to_c64_vec());
            let mut d = vec![Complex64::zero(); n * n];
            for i1 in 0..n1 {
                for j1 in 0..n1 {
                    for i2 in 0..n2 {
                        for j2 in 0..n2 {
                            d[idx(i1, i2) * n + idx(j1, j2)] = a[i1 * n1 + j1] * b[i2 * n2 + j2];
                        }
                    }
                }
            }
            let tol = [m1.tol(), m2.tol(), DEFAULT_TOL].into_iter().fold(0.0, f64::max);
            GameMatrix::from_float(m, q, d, tol)
        }
    }
}
