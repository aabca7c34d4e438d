//! Dense bit matrices over GF(2).
//!
//! Rows are packed into `u64` words, so a matrix is limited to 64 columns.
//! Every matrix in this crate is seed-sized (a few dozen coordinates at
//! most); long error words never pass through a single matrix.

use crate::{Error, Result};

pub const MAX_COLS: usize = 64;

/// A dense binary matrix with at most 64 columns. Row `r` is a column mask:
/// output coordinate `r` is the parity of the masked input coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<u64>,
    ncols: usize,
}

impl BitMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Result<Self> {
        if ncols > MAX_COLS {
            return Err(Error::Dimension(format!(
                "matrix width {ncols} exceeds the {MAX_COLS}-column limit"
            )));
        }
        Ok(Self {
            rows: vec![0; nrows],
            ncols,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        Ok(m)
    }

    pub fn from_rows(rows: Vec<u64>, ncols: usize) -> Result<Self> {
        if ncols > MAX_COLS {
            return Err(Error::Dimension(format!(
                "matrix width {ncols} exceeds the {MAX_COLS}-column limit"
            )));
        }
        let mask = mask(ncols);
        if let Some(r) = rows.iter().position(|&row| row & !mask != 0) {
            return Err(Error::Dimension(format!(
                "matrix row {r} has bits beyond column {ncols}"
            )));
        }
        Ok(Self { rows, ncols })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> u64 {
        self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.rows[r] >> c) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        if v {
            self.rows[r] |= 1 << c;
        } else {
            self.rows[r] &= !(1 << c);
        }
    }

    /// Matrix–vector product: bit `r` of the result is `parity(row_r & v)`.
    pub fn apply(&self, v: u64) -> u64 {
        let mut out = 0u64;
        for (r, &row) in self.rows.iter().enumerate() {
            out |= (((row & v).count_ones() as u64) & 1) << r;
        }
        out
    }

    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.ncols != rhs.nrows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows(),
                self.ncols,
                rhs.nrows(),
                rhs.ncols
            )));
        }
        // (AB) row r = xor of rhs rows selected by A's row mask.
        let mut rows = Vec::with_capacity(self.nrows());
        for &arow in &self.rows {
            let mut acc = 0u64;
            let mut m = arow;
            while m != 0 {
                let c = m.trailing_zeros() as usize;
                acc ^= rhs.rows[c];
                m &= m - 1;
            }
            rows.push(acc);
        }
        BitMatrix::from_rows(rows, rhs.ncols)
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.ncols {
            let Some(p) = (rank..rows.len()).find(|&r| (rows[r] >> c) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && (*row >> c) & 1 == 1 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.nrows() == self.ncols && self.rank() == self.ncols
    }

    /// Gauss–Jordan inverse; `None` when the matrix is singular or not square.
    pub fn inverted(&self) -> Option<BitMatrix> {
        if self.nrows() != self.ncols {
            return None;
        }
        let n = self.ncols;
        let mut a = self.rows.clone();
        let mut inv: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for c in 0..n {
            let p = (c..n).find(|&r| (a[r] >> c) & 1 == 1)?;
            a.swap(c, p);
            inv.swap(c, p);
            for r in 0..n {
                if r != c && (a[r] >> c) & 1 == 1 {
                    a[r] ^= a[c];
                    inv[r] ^= inv[c];
                }
            }
        }
        Some(BitMatrix {
            rows: inv,
            ncols: n,
        })
    }

    pub fn transposed(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.ncols, self.nrows())
            .expect("transpose height bounded by the column limit");
        for (r, &row) in self.rows.iter().enumerate() {
            let mut m = row;
            while m != 0 {
                let c = m.trailing_zeros() as usize;
                out.rows[c] |= 1 << r;
                m &= m - 1;
            }
        }
        out
    }

    /// Rows as '0'/'1' strings, least significant column first.
    pub fn row_strings(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|&row| {
                (0..self.ncols)
                    .map(|c| if (row >> c) & 1 == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    /// Parse rows written as '0'/'1' strings (first character = column 0).
    pub fn parse_rows(rows: &[String], ncols: usize) -> Result<Self> {
        let mut packed = Vec::with_capacity(rows.len());
        for (i, s) in rows.iter().enumerate() {
            if s.len() != ncols {
                return Err(Error::Spec(format!(
                    "matrix row {i} has length {}, expected {ncols}",
                    s.len()
                )));
            }
            let mut row = 0u64;
            for (c, ch) in s.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => row |= 1 << c,
                    _ => {
                        return Err(Error::Spec(format!(
                            "matrix row {i} has invalid character {ch:?} at column {c}"
                        )))
                    }
                }
            }
            packed.push(row);
        }
        BitMatrix::from_rows(packed, ncols)
    }

    /// Uniform random invertible matrix, by rejection.
    pub fn random_invertible<R: rand::Rng>(rng: &mut R, n: usize) -> Result<Self> {
        if n > MAX_COLS {
            return Err(Error::Dimension(format!("side {n} exceeds {MAX_COLS}")));
        }
        let m = mask(n);
        loop {
            let rows: Vec<u64> = (0..n).map(|_| rng.gen::<u64>() & m).collect();
            let cand = BitMatrix { rows, ncols: n };
            if cand.is_invertible() {
                return Ok(cand);
            }
        }
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitMatrix[{}x{}]{:?}", self.nrows(), self.ncols, self.row_strings())
    }
}

pub fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Growable bit set indexed by state number.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StateSet {
    words: Vec<u64>,
    len: usize,
}

impl StateSet {
    pub fn new(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::new(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    /// Size of the universe the set draws from (not the member count).
    pub fn len(&self) -> usize {
        self.len
    }

    /// No members at all (the universe may still be nonempty).
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn complement(&self) -> Self {
        let mut out = Self::new(self.len);
        for i in 0..self.len {
            if !self.contains(i) {
                out.insert(i);
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }
}
