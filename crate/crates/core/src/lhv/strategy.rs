use std::fmt;

use crate::error::{Error, Result};

/// Digits in `[0, q)` packed at `ceil(log2 q)` bits each.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Packed {
    len: usize,
    width: u32,
    words: Vec<u64>,
}

impl Packed {
    fn new(q: usize, digits: &[usize]) -> Self {
        let width = usize::BITS - (q - 1).leading_zeros();
        let width = width.max(1);
        let per = (64 / width) as usize;
        let mut words = vec![0u64; digits.len().div_ceil(per)];
        for (i, &d) in digits.iter().enumerate() {
            words[i / per] |= (d as u64) << ((i % per) as u32 * width);
        }
        Packed {
            len: digits.len(),
            width,
            words,
        }
    }

    fn get(&self, i: usize) -> usize {
        let per = (64 / self.width) as usize;
        let mask = (1u64 << self.width) - 1;
        ((self.words[i / per] >> ((i % per) as u32 * self.width)) & mask) as usize
    }

    fn to_vec(&self) -> Vec<usize> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

/// Deterministic local strategy: Alice answers `w^alice[x]` on setting `x`,
/// Bob answers `w^bob[y]` on setting `y`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Strategy {
    q: usize,
    alice: Packed,
    bob: Packed,
}

impl Strategy {
    pub fn new(q: usize, alice: &[usize], bob: &[usize]) -> Result<Self> {
        if q < 2 {
            return Err(Error::Dimension(format!("need at least two outcomes, got q={q}")));
        }
        if alice.len() != bob.len() {
            return Err(Error::Dimension(format!(
                "alice has {} settings, bob has {}",
                alice.len(),
                bob.len()
            )));
        }
        if let Some(&d) = alice.iter().chain(bob).find(|&&d| d >= q) {
            return Err(Error::Invalid(format!("exponent {d} out of range for q={q}")));
        }
        Ok(Strategy {
            q,
            alice: Packed::new(q, alice),
            bob: Packed::new(q, bob),
        })
    }

    /// Every answer equal to `+1`.
    pub fn all_plus(m: usize, q: usize) -> Result<Self> {
        Self::new(q, &vec![0; m], &vec![0; m])
    }

    /// Two-outcome strategy from sign vectors.
    pub fn from_signs(alice: &[i8], bob: &[i8]) -> Result<Self> {
        let conv = |v: &[i8]| -> Vec<usize> { v.iter().map(|&s| usize::from(s < 0)).collect() };
        Self::new(2, &conv(alice), &conv(bob))
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn m(&self) -> usize {
        self.alice.len
    }

    pub fn alice(&self, x: usize) -> usize {
        self.alice.get(x)
    }

    pub fn bob(&self, y: usize) -> usize {
        self.bob.get(y)
    }

    pub fn alice_exponents(&self) -> Vec<usize> {
        self.alice.to_vec()
    }

    pub fn bob_exponents(&self) -> Vec<usize> {
        self.bob.to_vec()
    }
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Strategy(q={}, a={:?}, b={:?})", self.q, self.alice_exponents(), self.bob_exponents())
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Vec<usize>| {
            if self.q == 2 {
                v.iter().map(|&d| if d == 0 { '+' } else { '-' }).collect::<String>()
            } else {
                v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
            }
        };
        write!(f, "a=[{}] b=[{}]", show(self.alice_exponents()), show(self.bob_exponents()))
    }
}
