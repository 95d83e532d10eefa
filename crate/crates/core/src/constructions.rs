//! Matrix families: Sylvester and Paley Hadamard matrices, circulants, the
//! Fourier-square games and their probability form, and Gram-based
//! predicates for Hadamard, conference, skew-type and weighing matrices.

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::game::{embed_core, CorrelationCore, GameMatrix, GameTensor};
use crate::scalar::{exact_outcomes, exact_root, root_of_unity, DEFAULT_TOL};

/// Square matrix with entries in `{-1, 0, 1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignMatrix {
    n: usize,
    data: Vec<i8>,
}

impl SignMatrix {
    pub fn new(n: usize, data: Vec<i8>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "order {n} needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(Error::Invalid(format!("entry {v} is not in {{-1, 0, 1}}")));
        }
        Ok(SignMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension(format!("row of length {} in order {n}", r.len())));
        }
        Self::new(n, rows.concat())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[i8] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> SignMatrix {
        let n = self.n;
        SignMatrix {
            n,
            data: (0..n * n).map(|k| self.data[(k % n) * n + k / n]).collect(),
        }
    }

    pub fn kron(&self, other: &SignMatrix) -> SignMatrix {
        let (a, b) = (self.n, other.n);
        let n = a * b;
        let mut data = vec![0i8; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.get(i / b, j / b) * other.get(i % b, j % b);
            }
        }
        SignMatrix { n, data }
    }

    /// `A A^T` as integers.
    pub fn gram(&self) -> Vec<i64> {
        self.product_t(self)
    }

    /// `A B^T` as integers.
    pub fn product_t(&self, other: &SignMatrix) -> Vec<i64> {
        let n = self.n;
        let mut g = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                g[i * n + j] = self
                    .row(i)
                    .iter()
                    .zip(other.row(j))
                    .map(|(&x, &y)| (x * y) as i64)
                    .sum();
            }
        }
        g
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|&v| v as i64).sum())
            .collect()
    }

    pub fn excess(&self) -> i64 {
        self.data.iter().map(|&v| v as i64).sum()
    }

    pub fn to_i64(&self) -> Vec<i64> {
        self.data.iter().map(|&v| v as i64).collect()
    }

    /// The two-outcome correlation core with this matrix as entries.
    pub fn to_core(&self) -> CorrelationCore {
        CorrelationCore::from_int_matrix(self.n, &self.to_i64()).expect("square")
    }

    /// Correlation game of order `2n` whose core is this matrix.
    pub fn to_game(&self) -> GameMatrix {
        embed_core(&self.to_core())
    }

    /// Rows as strings over `+`, `-`, `0`.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.n + 1));
        for i in 0..self.n {
            for &v in self.row(i) {
                s.push(match v {
                    1 => '+',
                    -1 => '-',
                    _ => '0',
                });
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SignMatrix({})", self.n)?;
        f.write_str(&self.to_text())
    }
}

/// First position where `g` differs from `k I`.
fn gram_defect(g: &[i64], n: usize, k: i64) -> Option<(usize, usize)> {
    (0..n * n)
        .find(|&p| g[p] != if p / n == p % n { k } else { 0 })
        .map(|p| (p / n, p % n))
}

/// `H H^T = n I` with entries `+-1`. Returns the first defect on failure.
pub fn hadamard_defect(h: &SignMatrix) -> Option<(usize, usize)> {
    let n = h.n;
    if let Some(p) = h.data.iter().position(|&v| v == 0) {
        return Some((p / n, p % n));
    }
    gram_defect(&h.gram(), n, n as i64)
}

pub fn is_hadamard(h: &SignMatrix) -> bool {
    hadamard_defect(h).is_none()
}

/// Zero diagonal, `+-1` elsewhere, `C C^T = (n - 1) I`.
pub fn is_conference(c: &SignMatrix) -> bool {
    let n = c.n;
    let shape = (0..n * n).all(|p| (c.data[p] == 0) == (p / n == p % n));
    shape && gram_defect(&c.gram(), n, n as i64 - 1).is_none()
}

/// Hadamard with `H - I` skew-symmetric.
pub fn is_skew_type(h: &SignMatrix) -> bool {
    let n = h.n;
    is_hadamard(h)
        && (0..n).all(|i| {
            (0..n).all(|j| {
                let a = h.get(i, j) - i8::from(i == j);
                let b = h.get(j, i) - i8::from(i == j);
                a == -b
            })
        })
}

/// The weight `k` with `W W^T = k I`, if any.
pub fn weighing_weight(w: &SignMatrix) -> Option<u64> {
    let n = w.n;
    if n == 0 {
        return None;
    }
    let g = w.gram();
    let k = g[0];
    (gram_defect(&g, n, k).is_none()).then_some(k as u64)
}

/// `H_2^{(x) k}`, of order `2^k`.
pub fn sylvester(k: u32) -> SignMatrix {
    let h2 = SignMatrix::new(2, vec![1, 1, 1, -1]).expect("valid");
    (0..k).fold(SignMatrix::new(1, vec![1]).expect("valid"), |acc, _| acc.kron(&h2))
}

fn is_prime(l: u64) -> bool {
    l >= 2 && (2..).take_while(|d| d * d <= l).all(|d| l % d != 0)
}

/// Hadamard matrix of order `l + 1` from the quadratic residues of `F_l`:
/// corner `-1`, a border of ones, and `A[i][j] = 1` iff `j - i` is zero or a
/// nonzero square. Requires a prime `l = 3 mod 4`.
pub fn paley_hadamard(l: u64) -> Result<SignMatrix> {
    if !is_prime(l) || l % 4 != 3 {
        return Err(Error::Invalid(format!("order parameter {l} must be a prime congruent to 3 mod 4")));
    }
    let l = l as usize;
    let mut square = vec![false; l];
    for x in 1..l {
        square[x * x % l] = true;
    }
    let n = l + 1;
    let mut data = vec![1i8; n * n];
    data[0] = -1;
    for i in 0..l {
        for j in 0..l {
            let d = (j + l - i) % l;
            data[(i + 1) * n + j + 1] = if d == 0 || square[d] { 1 } else { -1 };
        }
    }
    let h = SignMatrix::new(n, data)?;
    debug_assert!(is_hadamard(&h));
    Ok(h)
}

/// Circulant matrix: row `i` is `first_row` shifted right by `i`.
pub fn circulant(first_row: &[i8]) -> Result<SignMatrix> {
    let n = first_row.len();
    SignMatrix::new(n, (0..n * n).map(|k| first_row[(k % n + n - k / n) % n]).collect())
}

/// Game with `q` settings and outcomes and `M[q s + x][q t + y] = w^(x t - s y)`.
pub fn fourier_square(q: usize) -> Result<GameMatrix> {
    if q < 2 {
        return Err(Error::Invalid(format!("need q >= 2, got {q}")));
    }
    let n = q * q;
    let exponent = |i: usize, j: usize| {
        let (s, x, t, y) = (i / q, i % q, j / q, j % q);
        (x * t + q * q - s * y) % q
    };
    if exact_outcomes(q) {
        let data = (0..n * n)
            .map(|p| exact_root(q, exponent(p / n, p % n)).expect("exact"))
            .collect();
        GameMatrix::from_exact(q, q, data)
    } else {
        let data = (0..n * n)
            .map(|p| root_of_unity(q, exponent(p / n, p % n)))
            .collect::<Vec<Complex64>>();
        GameMatrix::from_float(q, q, data, DEFAULT_TOL)
    }
}

/// Guess-your-neighbour's-input: `S[a][b][x][y] = 1` iff `x = b` and `y = a`.
pub fn gyni_tensor(q: usize) -> Result<GameTensor> {
    let mut s = GameTensor::zeros(q, q)?;
    for a in 0..q {
        for b in 0..q {
            s.set(a, b, b, a, BigRational::one());
        }
    }
    Ok(s)
}

/// Parameters `(m, k, l, a)` of a verified pair of quasi-unbiased weighing matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MquwmParams {
    pub m: usize,
    pub k: u64,
    pub l: u64,
    pub a: u64,
}

/// Check that `W1 W2^T / sqrt(a)` is a weighing matrix of weight `k^2 / a`.
///
/// With `X = W1 W2^T` the test is exact: every entry of `X` squares to `0` or
/// `a`, and `X X^T = a l I`.
pub fn mquwm_check(w1: &SignMatrix, w2: &SignMatrix, a: u64) -> Result<MquwmParams> {
    let m = w1.n;
    if w2.n != m {
        return Err(Error::Dimension(format!("orders {m} and {} differ", w2.n)));
    }
    let fail = |detail: String| Error::Kind {
        kind: "quasi-unbiased weighing pair",
        detail,
    };
    let k1 = weighing_weight(w1).ok_or_else(|| Error::Kind {
        kind: "weighing",
        detail: "first matrix".into(),
    })?;
    let k2 = weighing_weight(w2).ok_or_else(|| Error::Kind {
        kind: "weighing",
        detail: "second matrix".into(),
    })?;
    if k1 != k2 {
        return Err(fail(format!("weights {k1} and {k2} differ")));
    }
    let k = k1;
    if a == 0 || (k * k) % a != 0 {
        return Err(fail(format!("a = {a} does not divide k^2 = {}", k * k)));
    }
    let l = k * k / a;
    let x = w1.product_t(w2);
    if let Some(p) = x.iter().position(|&v| v * v != 0 && v * v != a as i64) {
        return Err(fail(format!(
            "entry ({}, {}) of W1 W2^T is {}, its square is neither 0 nor {a}",
            p / m,
            p % m,
            x[p]
        )));
    }
    let mut xx = vec![0i64; m * m];
    for i in 0..m {
        for j in 0..m {
            xx[i * m + j] = (0..m).map(|c| x[i * m + c] * x[j * m + c]).sum();
        }
    }
    if let Some((i, j)) = gram_defect(&xx, m, (a * l) as i64) {
        return Err(fail(format!(
            "scaled product has Gram entry ({i}, {j}) = {}, expected weight {l}",
            xx[i * m + j] as f64 / a as f64
        )));
    }
    Ok(MquwmParams { m, k, l, a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{constant_row_sum, tensor_from_game_matrix, validate_symmetry};
    use crate::scalar::{int_rat, Scalar};
    use num_traits::Zero;

    #[test]
    fn sylvester_orders() {
        assert_eq!(sylvester(0).data(), &[1]);
        assert_eq!(sylvester(1).data(), &[1, 1, 1, -1]);
        for k in 0..6 {
            let h = sylvester(k);
            assert_eq!(h.order(), 1 << k);
            assert!(is_hadamard(&h));
        }
    }

    #[test]
    fn paley_orders() {
        for l in [3, 7, 11, 19, 23, 31, 43] {
            assert!(is_hadamard(&paley_hadamard(l).unwrap()), "l={l}");
        }
        assert!(paley_hadamard(13).is_err());
        assert!(paley_hadamard(15).is_err());
        assert!(paley_hadamard(9).is_err());
    }

    #[test]
    fn circulants() {
        let c = circulant(&[-1, 1, 1, 1]).unwrap();
        assert!(is_hadamard(&c));
        assert_eq!(c.row_sums(), vec![2; 4]);
        let s = circulant(&[0, -1, 1]).unwrap();
        assert_eq!(s.transpose().data(), s.data().iter().map(|v| -v).collect::<Vec<_>>().as_slice());
        assert_eq!(circulant(&[1]).unwrap().data(), &[1]);
    }

    #[test]
    fn predicates() {
        let conf = SignMatrix::new(2, vec![0, 1, 1, 0]).unwrap();
        assert!(is_conference(&conf));
        assert!(!is_hadamard(&conf));
        assert_eq!(weighing_weight(&sylvester(1)), Some(2));
        assert_eq!(weighing_weight(&SignMatrix::new(2, vec![1, 1, 1, 1]).unwrap()), None);
        // I + S with S skew and S S^T = (n-1) I gives a skew-type Hadamard matrix.
        let skew = SignMatrix::new(2, vec![1, 1, -1, 1]).unwrap();
        assert!(is_skew_type(&skew));
        assert!(!is_skew_type(&sylvester(1)));
    }

    #[test]
    fn fourier_square_properties() {
        for q in 2..=7 {
            let m = fourier_square(q).unwrap();
            assert!(validate_symmetry(&m, 1e-9).is_ok(), "q={q}");
            let n = q * q;
            let d = m.to_c64_vec();
            for i in 0..n {
                for j in 0..n {
                    let g: Complex64 = (0..n).map(|c| d[i * n + c] * d[j * n + c].conj()).sum();
                    let want = if i == j { (q * q) as f64 } else { 0.0 };
                    assert!((g - want).norm() < 1e-9);
                }
            }
        }
        let m = fourier_square(2).unwrap();
        assert!(m.is_real());
        assert_eq!(m.entry_c64(3, 3), Complex64::new(1.0, 0.0));
        assert!(!crate::game::is_correlation_matrix(&m));
    }

    #[test]
    fn fourier_square_inverse_transform() {
        for q in [2usize, 3, 4] {
            let t = tensor_from_game_matrix(&fourier_square(q).unwrap()).unwrap();
            for a in 0..q {
                for b in 0..q {
                    for x in 0..q {
                        for y in 0..q {
                            let want = if b == x && (a + y) % q == 0 { (q * q) as i64 } else { 0 };
                            assert_eq!(t.get(a, b, x, y), &int_rat(want));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gyni_has_q_squared_ones() {
        let t = gyni_tensor(3).unwrap();
        assert_eq!(t.coeffs().iter().filter(|c| !c.is_zero()).count(), 9);
    }

    #[test]
    fn hadamard_row_sum_matrix() {
        let m = circulant(&[-1, 1, 1, 1]).unwrap().to_game();
        // Embedded rows of the zero blocks sum to 0, the core rows to 2.
        assert_eq!(constant_row_sum(&m, 0.0), None::<Scalar>);
    }

    #[test]
    fn mquwm_small_cases() {
        let h2 = sylvester(1);
        let f = SignMatrix::new(2, vec![1, 1, -1, 1]).unwrap();
        // H2 (H2 flipped)^T has entries 0, +-2: weight-one scaled product.
        let p = mquwm_check(&h2, &f, 4).unwrap();
        assert_eq!((p.k, p.l), (2, 1));
        assert!(mquwm_check(&h2, &h2, 1).is_err());
        let w1 = SignMatrix::new(2, vec![1, 0, 0, 1]).unwrap();
        assert!(mquwm_check(&h2, &w1, 1).is_err());
        assert!(mquwm_check(&h2, &SignMatrix::new(1, vec![1]).unwrap(), 1).is_err());
    }
}
