//! Integer partitions (Young diagrams) and their hook-length data.
//!
//! Instanton sums run over pairs of partitions graded by total size, so
//! this module provides enumeration in a fixed (reverse-lexicographic)
//! order plus the two quantities the summands need: the transpose profile
//! and dim(lambda)/|lambda|! computed from the hook-length formula.

use crate::error::{Error, Result};

/// Largest partition size the library ever enumerates. Instanton sums are
/// truncated far below this; the cap just keeps accidental huge requests
/// from allocating without bound.
pub const MAX_SIZE: usize = 64;

/// A partition of a non-negative integer: weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Builds a partition after checking that parts are positive and
    /// weakly decreasing and that the total does not exceed [`MAX_SIZE`].
    pub fn new(parts: &[usize]) -> Result<Self> {
        for w in parts.windows(2) {
            if w[0] < w[1] {
                return Err(Error::Validation(format!(
                    "parts must be weakly decreasing, got {:?}",
                    parts
                )));
            }
        }
        if parts.contains(&0) {
            return Err(Error::Validation("zero part in partition".into()));
        }
        let size: usize = parts.iter().sum();
        if size > MAX_SIZE {
            return Err(Error::Validation(format!(
                "partition size {} exceeds cap {}",
                size, MAX_SIZE
            )));
        }
        Ok(Partition(parts.to_vec()))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// |lambda|, the number being partitioned.
    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of (positive) parts.
    pub fn rows(&self) -> usize {
        self.0.len()
    }

    /// Part `i` (0-based); 0 beyond the last row, so profile formulas can
    /// index freely.
    pub fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// Conjugate diagram: column lengths become row lengths.
    pub fn transpose(&self) -> Partition {
        if self.0.is_empty() {
            return Partition::empty();
        }
        let cols = self.0[0];
        let mut t = Vec::with_capacity(cols);
        for j in 0..cols {
            t.push(self.0.iter().take_while(|&&p| p > j).count());
        }
        Partition(t)
    }

    /// Cells (row, col), 0-based, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &len)| (0..len).map(move |j| (i, j)))
    }

    /// Product of all hook lengths, in floating point. Exact for sizes
    /// small enough that the product stays below 2^53 and accurate to a
    /// few ulp beyond that.
    pub fn hook_product(&self) -> f64 {
        let t = self.transpose();
        let mut prod = 1.0;
        for (i, j) in self.cells() {
            prod *= (self.part(i) - j + t.part(j) - i - 1) as f64;
        }
        prod
    }

    /// Product of all hook lengths as an exact integer. Only valid while
    /// the product fits in u128, which holds for all sizes this library
    /// enumerates exactly (the product is at most |lambda|!).
    pub fn hook_product_exact(&self) -> u128 {
        let t = self.transpose();
        let mut prod: u128 = 1;
        for (i, j) in self.cells() {
            prod *= (self.part(i) - j + t.part(j) - i - 1) as u128;
        }
        prod
    }

    /// dim(lambda) / |lambda|! via the hook-length formula. This is the
    /// weight each diagram carries in the instanton sum.
    pub fn dim_ratio(&self) -> f64 {
        1.0 / self.hook_product()
    }

    /// Number of standard Young tableaux of this shape, exactly:
    /// |lambda|! / (product of hooks). Requires |lambda| <= 25 so the
    /// factorial fits in u128.
    pub fn dim_exact(&self) -> u128 {
        let n = self.size();
        assert!(n <= 25, "dim_exact limited to |lambda| <= 25");
        factorial_u128(n) / self.hook_product_exact()
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p)?;
        }
        write!(f, ")")
    }
}

fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All partitions of `n` in reverse-lexicographic order, `(n)` first and
/// `(1,...,1)` last. `n = 0` yields just the empty partition.
pub fn enumerate(n: usize) -> Result<Vec<Partition>> {
    if n > MAX_SIZE {
        return Err(Error::Validation(format!(
            "partition size {} exceeds cap {}",
            n, MAX_SIZE
        )));
    }
    if n == 0 {
        return Ok(vec![Partition::empty()]);
    }
    let mut out = Vec::with_capacity(count(n) as usize);
    let mut cur = vec![n];
    loop {
        out.push(Partition(cur.clone()));
        // Successor in reverse-lex order: decrement the last part that is
        // larger than 1 and redistribute everything to its right greedily.
        let Some(i) = cur.iter().rposition(|&p| p > 1) else {
            break;
        };
        let m = cur[i] - 1;
        let mut rest = cur[i] + (cur.len() - 1 - i);
        cur.truncate(i);
        while rest > 0 {
            let chunk = rest.min(m);
            cur.push(chunk);
            rest -= chunk;
        }
    }
    Ok(out)
}

/// Partition counting function p(n) by the Euler pentagonal-number
/// recurrence. Cheap and exact; used to size allocations and as a
/// cardinality cross-check for [`enumerate`].
pub fn count(n: usize) -> u128 {
    let mut p = vec![0u128; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut total: i128 = 0;
        let mut k: i64 = 1;
        loop {
            let g1 = k * (3 * k - 1) / 2;
            let g2 = k * (3 * k + 1) / 2;
            if g1 as usize > m && g2 as usize > m {
                break;
            }
            let sign: i128 = if k % 2 == 0 { -1 } else { 1 };
            if g1 as usize <= m {
                total += sign * p[m - g1 as usize] as i128;
            }
            if g2 as usize <= m {
                total += sign * p[m - g2 as usize] as i128;
            }
            k += 1;
        }
        p[m] = total as u128;
    }
    p[n]
}
