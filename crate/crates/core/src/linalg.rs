//! Dense bit-packed linear algebra over GF(2).

use std::fmt;

const WORD: usize = 64;

/// A fixed-length vector over GF(2), packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = BitVec::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_ones<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = BitVec::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        self.xor_from(other, 0);
    }

    /// XORs `other` into `self`, skipping words before `start_word` (known to be zero in `other`).
    #[inline]
    fn xor_from(&mut self, other: &BitVec, start_word: usize) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words[start_word..]
            .iter_mut()
            .zip(&other.words[start_word..])
        {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        f.write_str("]")
    }
}

/// Reduced row echelon form of a set of row vectors.
///
/// Pivoting is deterministic: columns are scanned left to right and the first remaining row
/// with a one in the column becomes its pivot row. Every pivot row is zero in all other pivot
/// columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    row_of_col: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(mut rows: Vec<BitVec>, ncols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len == ncols), "row length mismatch");
        let mut rank = 0;
        let mut pivots = Vec::new();
        for col in 0..ncols {
            if rank == rows.len() {
                break;
            }
            let w = col / WORD;
            let bit = 1u64 << (col % WORD);
            let Some(found) = (rank..rows.len()).find(|&r| rows[r].words[w] & bit != 0) else {
                continue;
            };
            rows.swap(rank, found);
            let (before, rest) = rows.split_at_mut(rank);
            let (pivot, after) = rest.split_first_mut().expect("pivot row exists");
            for r in before.iter_mut().chain(after.iter_mut()) {
                if r.words[w] & bit != 0 {
                    r.xor_from(pivot, w);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        let mut row_of_col = vec![None; ncols];
        for (r, &c) in pivots.iter().enumerate() {
            row_of_col[c] = Some(r);
        }
        Echelon {
            ncols,
            rows,
            pivots,
            row_of_col,
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    /// Pivot column of each row.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn pivot_row(&self, col: usize) -> Option<&BitVec> {
        self.row_of_col[col].map(|r| &self.rows[r])
    }

    pub fn non_pivot_cols(&self) -> Vec<usize> {
        (0..self.ncols)
            .filter(|&c| self.row_of_col[c].is_none())
            .collect()
    }

    /// Reduces `v` modulo the row space. The result is supported on non-pivot columns only and
    /// is zero iff `v` lies in the row space.
    pub fn reduce(&self, v: &mut BitVec) {
        assert_eq!(v.len, self.ncols, "vector length mismatch");
        for (r, &c) in self.pivots.iter().enumerate() {
            if v.get(c) {
                v.xor_from(&self.rows[r], c / WORD);
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v);
        v.is_zero()
    }
}

/// Rank of the span of `rows`.
pub fn rank(rows: Vec<BitVec>, ncols: usize) -> usize {
    Echelon::new(rows, ncols).rank()
}
