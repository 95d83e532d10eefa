//! Plain-text formats for game matrices and tensors.
//!
//! Matrix files start with a header `n m q` followed by `n` rows of `n`
//! entries, each `R` or `R,I` with `R`, `I` decimal or `p/q`. Tensor files
//! start with `m q` followed by `q^2 m^2` lines `a b x y value`. Lines
//! beginning with `#` are comments.

use std::fmt::Write as _;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::game::{Entries, GameMatrix, GameTensor};
use crate::scalar::{parse_entry, parse_rational, DEFAULT_TOL};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected a non-negative integer, got {tok:?}")))
}

/// Parse a game matrix. Entries are kept exact.
pub fn parse_game_matrix(text: &str) -> Result<GameMatrix> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(0, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(Error::parse(hl, "header must be `n m q`"));
    }
    let (n, m, q) = (parse_usize(hl, h[0])?, parse_usize(hl, h[1])?, parse_usize(hl, h[2])?);
    if n != m * q {
        return Err(Error::parse(hl, format!("order {n} is not m*q = {}", m * q)));
    }
    let mut data = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (ln, l) in lines {
        if rows == n {
            return Err(Error::parse(ln, "more rows than the declared order"));
        }
        let row: Vec<&str> = l.split_whitespace().collect();
        if row.len() != n {
            return Err(Error::parse(ln, format!("expected {n} entries, got {}", row.len())));
        }
        for tok in row {
            data.push(parse_entry(tok).ok_or_else(|| Error::parse(ln, format!("bad entry {tok:?}")))?);
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::parse(0, format!("expected {n} rows, got {rows}")));
    }
    GameMatrix::from_exact(m, q, data)
}

/// Write a game matrix. Float entries are printed with 17 significant digits.
pub fn write_game_matrix(mat: &GameMatrix) -> String {
    let n = mat.order();
    let mut out = format!("{} {} {}\n", n, mat.m(), mat.q());
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| match mat.entries() {
                Entries::Exact(d) => d[i * n + j].to_string(),
                Entries::Float { data, .. } => {
                    let z = data[i * n + j];
                    if z.im == 0.0 {
                        format!("{:e}", z.re)
                    } else {
                        format!("{:e},{:e}", z.re, z.im)
                    }
                }
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parse a game tensor; coefficients not listed are zero.
pub fn parse_game_tensor(text: &str) -> Result<GameTensor> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(0, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 2 {
        return Err(Error::parse(hl, "header must be `m q`"));
    }
    let (m, q) = (parse_usize(hl, h[0])?, parse_usize(hl, h[1])?);
    let mut t = GameTensor::zeros(m, q)?;
    for (ln, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 5 {
            return Err(Error::parse(ln, "expected `a b x y value`"));
        }
        let idx: Vec<usize> = f[..4].iter().map(|s| parse_usize(ln, s)).collect::<Result<_>>()?;
        if idx[0] >= q || idx[1] >= q || idx[2] >= m || idx[3] >= m {
            return Err(Error::parse(ln, "index out of range"));
        }
        let v: BigRational =
            parse_rational(f[4]).ok_or_else(|| Error::parse(ln, format!("bad value {:?}", f[4])))?;
        t.set(idx[0], idx[1], idx[2], idx[3], v);
    }
    Ok(t)
}

/// Write every coefficient of a tensor, one per line.
pub fn write_game_tensor(t: &GameTensor) -> String {
    let (m, q) = (t.m(), t.q());
    let mut out = format!("{m} {q}\n");
    for a in 0..q {
        for b in 0..q {
            for x in 0..m {
                for y in 0..m {
                    let _ = writeln!(out, "{a} {b} {x} {y} {}", t.get(a, b, x, y));
                }
            }
        }
    }
    out
}

/// Parse a float matrix with an explicit tolerance (entries parsed exactly, then converted).
pub fn parse_game_matrix_float(text: &str, tol: f64) -> Result<GameMatrix> {
    Ok(parse_game_matrix(text)?.to_float(if tol > 0.0 { tol } else { DEFAULT_TOL }))
}
