//! Hadamard and weighing matrices in the `+`/`-`/`0` text format, with
//! embedded class representatives for the small orders.
//!
//! Each matrix is a block of equal-length lines; blank lines separate
//! matrices and lines starting with `#` are ignored.

use std::path::PathBuf;
use std::sync::OnceLock;

use crate::constructions::{hadamard_defect, weighing_weight, SignMatrix};
use crate::error::{Error, Result};
use crate::lhv::{correlation_lhv, LhvConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    /// `+-1` entries, `H H^T = n I`.
    Hadamard,
    /// `{-1, 0, 1}` entries, `W W^T = k I`.
    Weighing,
    /// No Gram condition.
    Any,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Embedded,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub order: usize,
    pub index: usize,
    pub matrix: SignMatrix,
    pub source: Source,
}

/// Parse every matrix in `text`, validating each against `kind`.
pub fn parse_catalogue_text(text: &str, kind: MatrixKind) -> Result<Vec<SignMatrix>> {
    let mut out = Vec::new();
    let mut block: Vec<Vec<i8>> = Vec::new();
    let mut start = 0;
    let mut finish = |block: &mut Vec<Vec<i8>>, start: usize| -> Result<()> {
        if block.is_empty() {
            return Ok(());
        }
        let rows = std::mem::take(block);
        let m = SignMatrix::from_rows(&rows).map_err(|e| Error::parse(start, e.to_string()))?;
        validate(&m, kind).map_err(|e| Error::parse(start, e.to_string()))?;
        out.push(m);
        Ok(())
    };
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            finish(&mut block, start)?;
            continue;
        }
        if block.is_empty() {
            start = i + 1;
        }
        let row = line
            .chars()
            .map(|c| match c {
                '+' | '1' => Ok(1),
                '-' => Ok(-1),
                '0' if kind != MatrixKind::Hadamard => Ok(0),
                _ => Err(Error::parse(i + 1, format!("invalid character {c:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if let Some(first) = block.first() {
            if first.len() != row.len() {
                return Err(Error::parse(
                    i + 1,
                    format!("row of length {} in a block of width {}", row.len(), first.len()),
                ));
            }
        }
        block.push(row);
    }
    finish(&mut block, start)?;
    Ok(out)
}

fn validate(m: &SignMatrix, kind: MatrixKind) -> Result<()> {
    match kind {
        MatrixKind::Hadamard => match hadamard_defect(m) {
            None => Ok(()),
            Some((i, j)) => Err(Error::Kind {
                kind: "Hadamard",
                detail: format!("Gram entry ({i}, {j}) is wrong"),
            }),
        },
        MatrixKind::Weighing => weighing_weight(m).map(|_| ()).ok_or_else(|| Error::Kind {
            kind: "weighing",
            detail: "W W^T is not a multiple of the identity".into(),
        }),
        MatrixKind::Any => Ok(()),
    }
}

const EMBEDDED: [(usize, &str); 7] = [
    (1, include_str!("../data/hadamard/had1.txt")),
    (2, include_str!("../data/hadamard/had2.txt")),
    (4, include_str!("../data/hadamard/had4.txt")),
    (8, include_str!("../data/hadamard/had8.txt")),
    (12, include_str!("../data/hadamard/had12.txt")),
    (16, include_str!("../data/hadamard/had16.txt")),
    (20, include_str!("../data/hadamard/had20.txt")),
];

fn embedded() -> &'static [(usize, Vec<SignMatrix>)] {
    static CELL: OnceLock<Vec<(usize, Vec<SignMatrix>)>> = OnceLock::new();
    CELL.get_or_init(|| {
        EMBEDDED
            .iter()
            .map(|&(n, text)| {
                let ms = parse_catalogue_text(text, MatrixKind::Hadamard).expect("embedded catalogue is valid");
                assert!(ms.iter().all(|m| m.order() == n));
                (n, ms)
            })
            .collect()
    })
}

/// Embedded representative `index` of the given order.
pub fn builtin(order: usize, index: usize) -> Result<CatalogEntry> {
    embedded()
        .iter()
        .find(|(n, _)| *n == order)
        .and_then(|(_, ms)| ms.get(index))
        .map(|m| CatalogEntry {
            order,
            index,
            matrix: m.clone(),
            source: Source::Embedded,
        })
        .ok_or(Error::UnknownEntry { order, index })
}

/// All `(order, index)` pairs available through [`builtin`].
pub fn builtin_keys() -> Vec<(usize, usize)> {
    embedded()
        .iter()
        .flat_map(|(n, ms)| (0..ms.len()).map(move |i| (*n, i)))
        .collect()
}

/// Load every matrix of a catalogue file.
pub fn load_file(path: &std::path::Path, kind: MatrixKind) -> Result<Vec<CatalogEntry>> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_catalogue_text(&text, kind)?
        .into_iter()
        .enumerate()
        .map(|(index, matrix)| CatalogEntry {
            order: matrix.order(),
            index,
            matrix,
            source: Source::File(path.to_path_buf()),
        })
        .collect())
}

/// Whether the equivalence class of a Hadamard matrix contains a matrix with
/// constant row sums, decided by `C^2 = n^3` for its correlation game.
pub fn detect_regular_equivalent(h: &SignMatrix, cfg: &LhvConfig) -> Result<bool> {
    if let Some((i, j)) = hadamard_defect(h) {
        return Err(Error::Kind {
            kind: "Hadamard",
            detail: format!("Gram entry ({i}, {j}) is wrong"),
        });
    }
    let n = h.order() as i128;
    let c = correlation_lhv(&h.to_core(), cfg)?
        .value
        .as_integer()
        .and_then(|c| i128::try_from(c).ok())
        .expect("integer core value");
    let regular = c * c == n * n * n;
    if regular {
        let r = (n as f64).sqrt().round() as i128;
        assert_eq!(r * r, n, "constant row sum Hadamard matrices have square order");
    }
    Ok(regular)
}

/// Which party a set of weighing matrices belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

/// Embedded weighing-matrix sets of orders 2, 4 and 8.
pub fn weighing_set(order: usize, party: Party) -> Result<Vec<SignMatrix>> {
    let text = match (order, party) {
        (2, Party::Alice) => include_str!("../data/appc/order2_alice.txt"),
        (2, Party::Bob) => include_str!("../data/appc/order2_bob.txt"),
        (4, Party::Alice) => include_str!("../data/appc/order4_alice.txt"),
        (4, Party::Bob) => include_str!("../data/appc/order4_bob.txt"),
        (8, Party::Alice) => include_str!("../data/appc/order8_alice.txt"),
        (8, Party::Bob) => include_str!("../data/appc/order8_bob.txt"),
        _ => return Err(Error::UnknownEntry { order, index: 0 }),
    };
    parse_catalogue_text(text, MatrixKind::Weighing)
}

/// Pairings `(i, j, k, l)` of the order-8 sets, 1-based: row `i` of Alice's
/// matrix `j` goes with row `k` of Bob's matrix `l`.
pub fn order8_pairings() -> Vec<[usize; 4]> {
    include_str!("../data/appc/order8_pairings.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let v: Vec<usize> = l.split_whitespace().map(|t| t.parse().expect("integer")).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}
