//! Bell expressions in probability form and in matrix form.
//!
//! A game with `m` settings and `q` outcomes per party is either a tensor of
//! coefficients `S[a][b][x][y]` weighting `P(a,b|x,y)`, or a square matrix of
//! order `n = m q` obtained from it by the double discrete Fourier transform
//!
//! ```text
//! M[m s + x][m t + y] = q^-2 * sum_{a,b} w^(s a + t b) S[a][b][x][y],   w = exp(2 pi i / q)
//! ```
//!
//! The matrix of a real tensor satisfies
//! `M[m(-s mod q) + x][m(-t mod q) + y] = conj(M[m s + x][m t + y])`,
//! which keeps every strategy value and the excess real.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result, SymmetryViolation};
use crate::scalar::{
    exact_outcomes, exact_root, rat_to_f64, root_of_unity, snap_rational, ExactComplex, Real,
    Scalar, DEFAULT_TOL,
};

/// Coefficients `S[a][b][x][y]` of a Bell expression in probability form.
#[derive(Clone, Debug, PartialEq)]
pub struct GameTensor {
    m: usize,
    q: usize,
    coeffs: Vec<BigRational>,
}

impl GameTensor {
    pub fn new(m: usize, q: usize, coeffs: Vec<BigRational>) -> Result<Self> {
        check_shape(m, q)?;
        let want = q * q * m * m;
        if coeffs.len() != want {
            return Err(Error::Dimension(format!(
                "tensor with m={m}, q={q} needs {want} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(GameTensor { m, q, coeffs })
    }

    pub fn zeros(m: usize, q: usize) -> Result<Self> {
        Self::new(m, q, vec![BigRational::zero(); q * q * m * m])
    }

    pub fn from_ints(m: usize, q: usize, coeffs: &[i64]) -> Result<Self> {
        Self::new(
            m,
            q,
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn idx(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        ((a * self.q + b) * self.m + x) * self.m + y
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> &BigRational {
        &self.coeffs[self.idx(a, b, x, y)]
    }

    pub fn set(&mut self, a: usize, b: usize, x: usize, y: usize, v: BigRational) {
        let i = self.idx(a, b, x, y);
        self.coeffs[i] = v;
    }
}

/// Entry storage of a [`GameMatrix`].
#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Exact(Vec<ExactComplex>),
    Float { data: Vec<Complex64>, tol: f64 },
}

/// Square matrix of order `m q` describing a Bell expression (row index `m s + x`).
#[derive(Clone, Debug, PartialEq)]
pub struct GameMatrix {
    m: usize,
    q: usize,
    entries: Entries,
}

fn check_shape(m: usize, q: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Dimension("at least one setting is required".into()));
    }
    if q < 2 {
        return Err(Error::Dimension(format!("need at least two outcomes, got q={q}")));
    }
    Ok(())
}

impl GameMatrix {
    pub fn from_exact(m: usize, q: usize, data: Vec<ExactComplex>) -> Result<Self> {
        check_shape(m, q)?;
        let n = m * q;
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "order {n} matrix needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(GameMatrix {
            m,
            q,
            entries: Entries::Exact(data),
        })
    }

    pub fn from_float(m: usize, q: usize, data: Vec<Complex64>, tol: f64) -> Result<Self> {
        check_shape(m, q)?;
        let n = m * q;
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "order {n} matrix needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::Invalid(format!("tolerance must be non-negative, got {tol}")));
        }
        Ok(GameMatrix {
            m,
            q,
            entries: Entries::Float { data, tol },
        })
    }

    pub fn from_real_ints(m: usize, q: usize, data: &[i64]) -> Result<Self> {
        Self::from_exact(m, q, data.iter().map(|&v| ExactComplex::from_int(v)).collect())
    }

    pub fn zeros(m: usize, q: usize) -> Result<Self> {
        check_shape(m, q)?;
        let n = m * q;
        Self::from_exact(m, q, vec![ExactComplex::zero(); n * n])
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn order(&self) -> usize {
        self.m * self.q
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.entries, Entries::Exact(_))
    }

    /// Tolerance used for float comparisons; zero for exact matrices.
    pub fn tol(&self) -> f64 {
        match &self.entries {
            Entries::Exact(_) => 0.0,
            Entries::Float { tol, .. } => *tol,
        }
    }

    pub fn index(&self, s: usize, x: usize) -> usize {
        self.m * s + x
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        let n = self.order();
        match &self.entries {
            Entries::Exact(d) => Scalar::Exact(d[i * n + j].clone()),
            Entries::Float { data, .. } => Scalar::Float(data[i * n + j]),
        }
    }

    pub fn entry_c64(&self, i: usize, j: usize) -> Complex64 {
        let n = self.order();
        match &self.entries {
            Entries::Exact(d) => d[i * n + j].to_c64(),
            Entries::Float { data, .. } => data[i * n + j],
        }
    }

    pub fn exact_entries(&self) -> Option<&[ExactComplex]> {
        match &self.entries {
            Entries::Exact(d) => Some(d),
            Entries::Float { .. } => None,
        }
    }

    /// Row-major float copy of the entries.
    pub fn to_c64_vec(&self) -> Vec<Complex64> {
        match &self.entries {
            Entries::Exact(d) => d.iter().map(ExactComplex::to_c64).collect(),
            Entries::Float { data, .. } => data.clone(),
        }
    }

    pub fn to_float(&self, tol: f64) -> GameMatrix {
        GameMatrix {
            m: self.m,
            q: self.q,
            entries: Entries::Float {
                data: self.to_c64_vec(),
                tol,
            },
        }
    }

    /// True when every entry has zero imaginary part (within tolerance for floats).
    pub fn is_real(&self) -> bool {
        self.first_complex_entry().is_none()
    }

    pub(crate) fn first_complex_entry(&self) -> Option<(usize, usize)> {
        let n = self.order();
        let pos = match &self.entries {
            Entries::Exact(d) => d.iter().position(|z| !z.is_real()),
            Entries::Float { data, tol } => data.iter().position(|z| z.im.abs() > *tol),
        };
        pos.map(|p| (p / n, p % n))
    }

    /// Entry-wise map that keeps the representation.
    pub(crate) fn map_entries<FE, FF>(&self, exact: FE, float: FF) -> GameMatrix
    where
        FE: Fn(usize, usize, &ExactComplex) -> ExactComplex,
        FF: Fn(usize, usize, Complex64) -> Complex64,
    {
        let n = self.order();
        let entries = match &self.entries {
            Entries::Exact(d) => Entries::Exact(
                d.iter()
                    .enumerate()
                    .map(|(k, z)| exact(k / n, k % n, z))
                    .collect(),
            ),
            Entries::Float { data, tol } => Entries::Float {
                data: data
                    .iter()
                    .enumerate()
                    .map(|(k, &z)| float(k / n, k % n, z))
                    .collect(),
                tol: *tol,
            },
        };
        GameMatrix {
            m: self.m,
            q: self.q,
            entries,
        }
    }

    /// Sum of all entries, required to be real.
    pub fn excess(&self) -> Result<Real> {
        excess(self)
    }

    /// Row sums, in row order.
    pub fn row_sums(&self) -> Vec<Scalar> {
        let n = self.order();
        match &self.entries {
            Entries::Exact(d) => d
                .chunks(n)
                .map(|row| Scalar::Exact(row.iter().fold(ExactComplex::zero(), |acc, z| &acc + z)))
                .collect(),
            Entries::Float { data, .. } => data
                .chunks(n)
                .map(|row| Scalar::Float(row.iter().sum()))
                .collect(),
        }
    }
}

/// Double Fourier transform from probability form to matrix form.
///
/// Exact entries are produced for two and four outcomes; other outcome
/// counts give float entries with the default tolerance.
pub fn game_matrix_from_tensor(s: &GameTensor) -> GameMatrix {
    let (m, q) = (s.m, s.q);
    let n = m * q;
    let q2 = BigRational::from_integer(BigInt::from((q * q) as i64));
    if exact_outcomes(q) {
        let mut data = vec![ExactComplex::zero(); n * n];
        for (st, x, y) in block_indices(m, q) {
            let (si, ti) = st;
            let mut acc = ExactComplex::zero();
            for a in 0..q {
                for b in 0..q {
                    let c = s.get(a, b, x, y);
                    if c.is_zero() {
                        continue;
                    }
                    let w = exact_root(q, si * a + ti * b).expect("exact outcomes");
                    acc = &acc + &w.scale(c);
                }
            }
            data[(m * si + x) * n + m * ti + y] = ExactComplex::new(&acc.re / &q2, &acc.im / &q2);
        }
        GameMatrix {
            m,
            q,
            entries: Entries::Exact(data),
        }
    } else {
        let coeffs: Vec<f64> = s.coeffs.iter().map(rat_to_f64).collect();
        let scale = 1.0 / (q * q) as f64;
        let mut data = vec![Complex64::zero(); n * n];
        for ((si, ti), x, y) in block_indices(m, q) {
            let mut acc = Complex64::zero();
            for a in 0..q {
                for b in 0..q {
                    let c = coeffs[s.idx(a, b, x, y)];
                    if c != 0.0 {
                        acc += root_of_unity(q, si * a + ti * b) * c;
                    }
                }
            }
            data[(m * si + x) * n + m * ti + y] = acc * scale;
        }
        GameMatrix {
            m,
            q,
            entries: Entries::Float {
                data,
                tol: DEFAULT_TOL,
            },
        }
    }
}

fn block_indices(m: usize, q: usize) -> impl Iterator<Item = ((usize, usize), usize, usize)> {
    (0..q).flat_map(move |s| {
        (0..q).flat_map(move |t| (0..m).flat_map(move |x| (0..m).map(move |y| ((s, t), x, y))))
    })
}

/// Inverse double Fourier transform back to probability form.
///
/// Float matrices give coefficients snapped to the simplest rational within
/// the matrix tolerance.
pub fn tensor_from_game_matrix(mat: &GameMatrix) -> Result<GameTensor> {
    validate_symmetry(mat, mat.tol())?;
    let (m, q) = (mat.m, mat.q);
    let n = m * q;
    let mut coeffs = vec![BigRational::zero(); q * q * m * m];
    let idx = |a: usize, b: usize, x: usize, y: usize| ((a * q + b) * m + x) * m + y;
    match &mat.entries {
        Entries::Exact(d) if exact_outcomes(q) => {
            for a in 0..q {
                for b in 0..q {
                    for x in 0..m {
                        for y in 0..m {
                            let mut acc = ExactComplex::zero();
                            for s in 0..q {
                                for t in 0..q {
                                    let z = &d[(m * s + x) * n + m * t + y];
                                    if z.is_zero() {
                                        continue;
                                    }
                                    let k = (q - (s * a + t * b) % q) % q;
                                    acc = &acc + &(&exact_root(q, k).expect("exact") * z);
                                }
                            }
                            if !acc.is_real() {
                                return Err(Error::NonReal(rat_to_f64(&acc.im)));
                            }
                            coeffs[idx(a, b, x, y)] = acc.re;
                        }
                    }
                }
            }
        }
        _ => {
            let data = mat.to_c64_vec();
            let tol = if mat.tol() > 0.0 { mat.tol() } else { DEFAULT_TOL };
            let scale_tol = tol * (q * q) as f64;
            for a in 0..q {
                for b in 0..q {
                    for x in 0..m {
                        for y in 0..m {
                            let mut acc = Complex64::zero();
                            for s in 0..q {
                                for t in 0..q {
                                    let k = (q - (s * a + t * b) % q) % q;
                                    acc += root_of_unity(q, k) * data[(m * s + x) * n + m * t + y];
                                }
                            }
                            if acc.im.abs() > scale_tol {
                                return Err(Error::NonReal(acc.im));
                            }
                            coeffs[idx(a, b, x, y)] = snap_rational(acc.re, scale_tol);
                        }
                    }
                }
            }
        }
    }
    GameTensor::new(m, q, coeffs)
}

/// Check `M[m(-s) + x][m(-t) + y] = conj(M[m s + x][m t + y])` on every entry.
///
/// Self-paired entries (`s, t` in `{0, q/2}`) are exactly the blocks that
/// must be real, so the real-block structure is covered by the same loop.
/// Exact matrices are compared exactly and `tol` is ignored.
pub fn validate_symmetry(mat: &GameMatrix, tol: f64) -> Result<()> {
    let (m, q) = (mat.m, mat.q);
    let n = m * q;
    let partner = |i: usize| m * ((q - i / m) % q) + i % m;
    for i in 0..n {
        let pi = partner(i);
        for j in 0..n {
            let pj = partner(j);
            let magnitude = match &mat.entries {
                Entries::Exact(d) => {
                    let a = &d[i * n + j];
                    let b = &d[pi * n + pj];
                    if a.re == b.re && a.im == -b.im.clone() {
                        continue;
                    }
                    (b.to_c64() - a.to_c64().conj()).norm()
                }
                Entries::Float { data, .. } => {
                    let dev = (data[pi * n + pj] - data[i * n + j].conj()).norm();
                    if dev <= tol {
                        continue;
                    }
                    dev
                }
            };
            return Err(Error::Symmetry(SymmetryViolation {
                entry: (i, j),
                partner: (pi, pj),
                magnitude,
            }));
        }
    }
    Ok(())
}

/// Sum of all entries. The imaginary part must vanish (exactly, or below
/// `1e-9 n^2` for float matrices).
pub fn excess(mat: &GameMatrix) -> Result<Real> {
    let n = mat.order();
    let total = match &mat.entries {
        Entries::Exact(d) => Scalar::Exact(d.iter().fold(ExactComplex::zero(), |acc, z| &acc + z)),
        Entries::Float { data, .. } => Scalar::Float(data.iter().sum()),
    };
    let tol = DEFAULT_TOL * (n * n) as f64;
    total
        .real_part(tol)
        .ok_or_else(|| Error::NonReal(total.to_c64().im))
}

/// True when every entry in the `s = 0` row block or `t = 0` column block vanishes.
pub fn is_correlation_matrix(mat: &GameMatrix) -> bool {
    let n = mat.order();
    let m = mat.m;
    first_marginal_entry(mat).is_none() && n > m
}

fn first_marginal_entry(mat: &GameMatrix) -> Option<(usize, usize)> {
    let n = mat.order();
    let m = mat.m;
    for i in 0..n {
        for j in 0..n {
            if i >= m && j >= m {
                continue;
            }
            let nonzero = match &mat.entries {
                Entries::Exact(d) => !d[i * n + j].is_zero(),
                Entries::Float { data, tol } => data[i * n + j].norm() > *tol,
            };
            if nonzero {
                return Some((i, j));
            }
        }
    }
    None
}

/// Common row sum of the matrix, if all rows agree (exactly, or within `tol`).
pub fn constant_row_sum(mat: &GameMatrix, tol: f64) -> Option<Scalar> {
    let sums = mat.row_sums();
    let first = sums.first()?.clone();
    let all_equal = sums.iter().all(|s| match (s, &first) {
        (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
        _ => (s.to_c64() - first.to_c64()).norm() <= tol,
    });
    all_equal.then_some(first)
}

/// Values of a [`CorrelationCore`], cleared of a common rational scale.
#[derive(Clone, Debug, PartialEq)]
pub enum CoreValues {
    Int(Vec<Complex<i64>>),
    Float(Vec<Complex64>),
}

/// The block of a correlation matrix with `s, t >= 1`, of order `m (q - 1)`.
///
/// Exact cores are stored as Gaussian integers times a positive rational
/// scale; for two outcomes they are plain integer matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationCore {
    m: usize,
    q: usize,
    scale: BigRational,
    values: CoreValues,
}

impl CorrelationCore {
    /// Integer core for two outcomes (`m` settings, unit scale).
    pub fn from_int_matrix(m: usize, data: &[i64]) -> Result<Self> {
        if m == 0 || data.len() != m * m {
            return Err(Error::Dimension(format!(
                "core of order {m} needs {} entries, got {}",
                m * m,
                data.len()
            )));
        }
        Ok(CorrelationCore {
            m,
            q: 2,
            scale: BigRational::one(),
            values: CoreValues::Int(data.iter().map(|&v| Complex::new(v, 0)).collect()),
        })
    }

    pub fn new(m: usize, q: usize, scale: BigRational, values: CoreValues) -> Result<Self> {
        check_shape(m, q)?;
        let order = m * (q - 1);
        let len = match &values {
            CoreValues::Int(v) => v.len(),
            CoreValues::Float(v) => v.len(),
        };
        if len != order * order {
            return Err(Error::Dimension(format!(
                "core of order {order} needs {} entries, got {len}",
                order * order
            )));
        }
        if scale <= BigRational::zero() {
            return Err(Error::Invalid("core scale must be positive".into()));
        }
        Ok(CorrelationCore {
            m,
            q,
            scale,
            values,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Core order `m (q - 1)`.
    pub fn order(&self) -> usize {
        self.m * (self.q - 1)
    }

    pub fn scale(&self) -> &BigRational {
        &self.scale
    }

    pub fn values(&self) -> &CoreValues {
        &self.values
    }

    /// Real integer values (before scaling) for an exact two-outcome core.
    pub fn real_ints(&self) -> Option<Vec<i64>> {
        match &self.values {
            CoreValues::Int(v) if v.iter().all(|z| z.im == 0) => Some(v.iter().map(|z| z.re).collect()),
            _ => None,
        }
    }

    pub fn entry(&self, a: usize, b: usize) -> Scalar {
        let k = a * self.order() + b;
        match &self.values {
            CoreValues::Int(v) => Scalar::Exact(
                ExactComplex::new(
                    BigRational::from_integer(BigInt::from(v[k].re)),
                    BigRational::from_integer(BigInt::from(v[k].im)),
                )
                .scale(&self.scale),
            ),
            CoreValues::Float(v) => Scalar::Float(v[k] * rat_to_f64(&self.scale)),
        }
    }

    pub fn excess(&self) -> Result<Real> {
        excess(&embed_core(self))
    }
}

/// Extract the core of a correlation matrix.
pub fn core_of(mat: &GameMatrix) -> Result<CorrelationCore> {
    if let Some(pos) = first_marginal_entry(mat) {
        return Err(Error::NotCorrelation(pos));
    }
    let (m, q) = (mat.m, mat.q);
    let n = m * q;
    let order = n - m;
    match &mat.entries {
        Entries::Exact(d) => {
            let block: Vec<&ExactComplex> = (m..n)
                .flat_map(|i| (m..n).map(move |j| (i, j)))
                .map(|(i, j)| &d[i * n + j])
                .collect();
            let lcm = block.iter().fold(BigInt::one(), |acc, z| {
                acc.lcm(z.re.denom()).lcm(z.im.denom())
            });
            let big: Vec<(BigInt, BigInt)> = block
                .iter()
                .map(|z| {
                    let re = (&z.re * BigRational::from_integer(lcm.clone())).to_integer();
                    let im = (&z.im * BigRational::from_integer(lcm.clone())).to_integer();
                    (re, im)
                })
                .collect();
            let mut g = big
                .iter()
                .fold(BigInt::zero(), |acc, (re, im)| acc.gcd(re).gcd(im));
            if g.is_zero() {
                g = BigInt::one();
            }
            let values = big
                .iter()
                .map(|(re, im)| {
                    let re = (re / &g).to_i64();
                    let im = (im / &g).to_i64();
                    match (re, im) {
                        (Some(re), Some(im)) => Ok(Complex::new(re, im)),
                        _ => Err(Error::Overflow("core entry exceeds 64-bit range".into())),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            debug_assert_eq!(values.len(), order * order);
            CorrelationCore::new(m, q, BigRational::new(g, lcm), CoreValues::Int(values))
        }
        Entries::Float { data, .. } => {
            let values = (m..n)
                .flat_map(|i| (m..n).map(move |j| data[i * n + j]))
                .collect();
            CorrelationCore::new(m, q, BigRational::one(), CoreValues::Float(values))
        }
    }
}

/// Embed a core into a full game matrix with vanishing marginal blocks.
pub fn embed_core(core: &CorrelationCore) -> GameMatrix {
    let (m, q) = (core.m, core.q);
    let n = m * q;
    let order = core.order();
    let entries = match &core.values {
        CoreValues::Int(v) => {
            let mut d = vec![ExactComplex::zero(); n * n];
            for a in 0..order {
                for b in 0..order {
                    let z = v[a * order + b];
                    if z.re != 0 || z.im != 0 {
                        d[(a + m) * n + b + m] = ExactComplex::new(
                            BigRational::from_integer(BigInt::from(z.re)),
                            BigRational::from_integer(BigInt::from(z.im)),
                        )
                        .scale(&core.scale);
                    }
                }
            }
            Entries::Exact(d)
        }
        CoreValues::Float(v) => {
            let s = rat_to_f64(&core.scale);
            let mut d = vec![Complex64::zero(); n * n];
            for a in 0..order {
                for b in 0..order {
                    d[(a + m) * n + b + m] = v[a * order + b] * s;
                }
            }
            Entries::Float {
                data: d,
                tol: DEFAULT_TOL,
            }
        }
    };
    GameMatrix { m, q, entries }
}

/// Relabeling of inputs and outputs, with outcome permutations allowed to
/// depend on the setting they belong to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling {
    /// `x -> x'` for Alice.
    pub alice_inputs: Vec<usize>,
    /// `y -> y'` for Bob.
    pub bob_inputs: Vec<usize>,
    /// For each original Alice setting `x`, the map `a -> a'`.
    pub alice_outputs: Vec<Vec<usize>>,
    /// For each original Bob setting `y`, the map `b -> b'`.
    pub bob_outputs: Vec<Vec<usize>>,
}

impl Relabeling {
    pub fn identity(m: usize, q: usize) -> Self {
        let id_m: Vec<usize> = (0..m).collect();
        let id_q: Vec<usize> = (0..q).collect();
        Relabeling {
            alice_inputs: id_m.clone(),
            bob_inputs: id_m,
            alice_outputs: vec![id_q.clone(); m],
            bob_outputs: vec![id_q; m],
        }
    }

    pub fn validate(&self, m: usize, q: usize) -> Result<()> {
        check_perm("alice inputs", &self.alice_inputs, m)?;
        check_perm("bob inputs", &self.bob_inputs, m)?;
        for (name, outs) in [("alice outputs", &self.alice_outputs), ("bob outputs", &self.bob_outputs)] {
            if outs.len() != m {
                return Err(Error::Permutation(format!(
                    "{name}: expected {m} per-setting permutations, got {}",
                    outs.len()
                )));
            }
            for p in outs {
                check_perm(name, p, q)?;
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Relabeling {
        let inv = |p: &[usize]| {
            let mut r = vec![0; p.len()];
            for (i, &v) in p.iter().enumerate() {
                r[v] = i;
            }
            r
        };
        let mut alice_outputs = vec![Vec::new(); self.alice_outputs.len()];
        for (x, p) in self.alice_outputs.iter().enumerate() {
            alice_outputs[self.alice_inputs[x]] = inv(p);
        }
        let mut bob_outputs = vec![Vec::new(); self.bob_outputs.len()];
        for (y, p) in self.bob_outputs.iter().enumerate() {
            bob_outputs[self.bob_inputs[y]] = inv(p);
        }
        Relabeling {
            alice_inputs: inv(&self.alice_inputs),
            bob_inputs: inv(&self.bob_inputs),
            alice_outputs,
            bob_outputs,
        }
    }
}

fn check_perm(name: &str, p: &[usize], size: usize) -> Result<()> {
    if p.len() != size {
        return Err(Error::Permutation(format!(
            "{name}: expected length {size}, got {}",
            p.len()
        )));
    }
    let mut seen = vec![false; size];
    for &v in p {
        if v >= size || std::mem::replace(&mut seen[v], true) {
            return Err(Error::Permutation(format!("{name}: {p:?} is not a bijection")));
        }
    }
    Ok(())
}

/// `S'[a'][b'][x'][y'] = S[a][b][x][y]` under the relabeling.
pub fn apply_relabeling(s: &GameTensor, r: &Relabeling) -> Result<GameTensor> {
    let (m, q) = (s.m, s.q);
    r.validate(m, q)?;
    let mut out = GameTensor::zeros(m, q)?;
    for a in 0..q {
        for b in 0..q {
            for x in 0..m {
                for y in 0..m {
                    let (xp, yp) = (r.alice_inputs[x], r.bob_inputs[y]);
                    let (ap, bp) = (r.alice_outputs[x][a], r.bob_outputs[y][b]);
                    out.set(ap, bp, xp, yp, s.get(a, b, x, y).clone());
                }
            }
        }
    }
    Ok(out)
}
