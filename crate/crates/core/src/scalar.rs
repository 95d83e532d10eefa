//! Exact and floating scalars shared by the game, solver and bound modules.
//!
//! Exact values are complex rationals. They are only meaningful when the
//! roots of unity involved are themselves rational Gaussian numbers, which
//! is the case for two and four outcomes.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

/// Default tolerance for floating-point symmetry and realness checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ExactComplex { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        ExactComplex {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ExactComplex {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Multiply by `i^k`.
    pub fn rotate_quarter(&self, k: usize) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => ExactComplex::new(-self.im.clone(), self.re.clone()),
            2 => ExactComplex::new(-self.re.clone(), -self.im.clone()),
            _ => ExactComplex::new(self.im.clone(), -self.re.clone()),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        ExactComplex::new(&self.re * r, &self.im * r)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl Add for &ExactComplex {
    type Output = ExactComplex;
    fn add(self, o: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &ExactComplex {
    type Output = ExactComplex;
    fn sub(self, o: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &ExactComplex {
    type Output = ExactComplex;
    fn mul(self, o: &ExactComplex) -> ExactComplex {
        ExactComplex::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for &ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex::new(-self.re.clone(), -self.im.clone())
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{},{}", self.re, self.im)
        }
    }
}

/// A real value that is exact when the computation allowed it.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(BigRational),
    Float(f64),
}

impl Real {
    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(r) => rat_to_f64(r),
            Real::Float(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Real::Exact(r) => Some(r),
            Real::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    /// Exact integer value, if this is an exact integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Real::Exact(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    /// Equality: exact when both sides are exact, otherwise within `tol`.
    pub fn approx_eq(&self, other: &Real, tol: f64) -> bool {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= tol,
        }
    }

    pub fn mul(&self, other: &Real) -> Real {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a * b),
            _ => Real::Float(self.to_f64() * other.to_f64()),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) => write!(f, "{r}"),
            Real::Float(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Real::Exact(r) if r.is_integer() => match r.to_integer().to_i64() {
                Some(v) => s.serialize_i64(v),
                None => s.serialize_str(&r.to_string()),
            },
            Real::Exact(r) => s.serialize_str(&r.to_string()),
            Real::Float(v) => s.serialize_f64(*v),
        }
    }
}

/// A complex value that is exact when the computation allowed it.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(ExactComplex),
    Float(Complex64),
}

impl Scalar {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(z) => z.to_c64(),
            Scalar::Float(z) => *z,
        }
    }

    /// Real part, provided the imaginary part vanishes (exactly or within `tol`).
    pub fn real_part(&self, tol: f64) -> Option<Real> {
        match self {
            Scalar::Exact(z) if z.is_real() => Some(Real::Exact(z.re.clone())),
            Scalar::Exact(_) => None,
            Scalar::Float(z) if z.im.abs() <= tol => Some(Real::Float(z.re)),
            Scalar::Float(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(z) => write!(f, "{z}"),
            Scalar::Float(z) if z.im == 0.0 => write!(f, "{}", z.re),
            Scalar::Float(z) => write!(f, "{},{}", z.re, z.im),
        }
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerator or denominator: shift both to a representable range.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn int_rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Parse a rational literal: integer, decimal (optionally with exponent) or `p/q`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let ten = BigInt::from(10);
    let scale = exp - frac_part.len() as i32;
    let mut r = BigRational::from_integer(all);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Parse an entry `R` or `R,I`.
pub fn parse_entry(s: &str) -> Option<ExactComplex> {
    match s.split_once(',') {
        Some((re, im)) => Some(ExactComplex::new(parse_rational(re)?, parse_rational(im)?)),
        None => Some(ExactComplex::real(parse_rational(s)?)),
    }
}

/// Closest simple rational to `v`: the first continued-fraction convergent
/// within `tol`, falling back to the exact binary value.
pub fn snap_rational(v: f64, tol: f64) -> BigRational {
    if !v.is_finite() {
        return BigRational::zero();
    }
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut x = v;
    for _ in 0..40 {
        let a = x.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let approx = BigRational::new(h1.clone(), k1.clone());
        if (rat_to_f64(&approx) - v).abs() <= tol {
            return approx;
        }
        let frac = x - a;
        if frac.abs() < 1e-300 {
            break;
        }
        x = 1.0 / frac;
    }
    BigRational::from_float(v).unwrap_or_else(BigRational::zero)
}

/// `omega^k` for `omega = exp(2 pi i / q)` as a float.
pub fn root_of_unity(q: usize, k: usize) -> Complex64 {
    let k = k % q;
    // Exact values at the quarter turns keep float games tidy.
    if (4 * k) % q == 0 {
        return match (4 * k / q) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64)
}

/// Quarter turns making up `omega^k` when `q` divides 4, i.e. `omega^k = i^turns`.
pub fn quarter_turns(q: usize, k: usize) -> Option<usize> {
    match q {
        1 => Some(0),
        2 => Some(2 * (k % 2)),
        4 => Some(k % 4),
        _ => None,
    }
}

/// Whether games with `q` outcomes admit exact entries.
pub fn exact_outcomes(q: usize) -> bool {
    quarter_turns(q, 0).is_some()
}

/// `omega^k` as an exact complex number when `q` divides 4.
pub fn exact_root(q: usize, k: usize) -> Option<ExactComplex> {
    quarter_turns(q, k).map(|t| ExactComplex::one().rotate_quarter(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3"), Some(rat(3, 1)));
        assert_eq!(parse_rational("-3/6"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-1.5e2"), Some(rat(-150, 1)));
        assert_eq!(parse_rational("2.5E-1"), Some(rat(1, 4)));
        assert_eq!(parse_rational(".5"), Some(rat(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn parses_complex_entry() {
        let z = parse_entry("1/2,-3").unwrap();
        assert_eq!(z.re, rat(1, 2));
        assert_eq!(z.im, rat(-3, 1));
        assert!(parse_entry("1,").is_none());
    }

    #[test]
    fn snaps_near_integers_and_fractions() {
        assert_eq!(snap_rational(2.0000000001, 1e-9), rat(2, 1));
        assert_eq!(snap_rational(-0.3333333333, 1e-9), rat(-1, 3));
        assert_eq!(snap_rational(0.0, 1e-9), rat(0, 1));
    }

    #[test]
    fn exact_roots_match_float_roots() {
        for q in [1, 2, 4] {
            for k in 0..q {
                let e = exact_root(q, k).unwrap().to_c64();
                let f = root_of_unity(q, k);
                assert!((e - f).norm() < 1e-15, "q={q} k={k}");
            }
        }
        assert!(exact_root(3, 1).is_none());
        assert!((root_of_unity(3, 1) - Complex64::from_polar(1.0, 2.0944)).norm() < 1e-4);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigRational::new(BigInt::from(3) << 2000, BigInt::from(1) << 2000);
        assert!((rat_to_f64(&big) - 3.0).abs() < 1e-12);
    }
}
