//! Exact linear algebra over prime fields GF(p).
//!
//! Everything downstream (code matrices, encoders, decoders, rank arguments)
//! runs on [`FieldMatrix`]. Arithmetic is exact integer arithmetic mod p;
//! there is no floating point in this module. GF(2) rows are bit-packed into
//! `u64` words since the exhaustive searches are dominated by that field;
//! other primes store one integer per entry.

use crate::{Error, Result};

/// Largest supported modulus. Extension fields and large primes are out of
/// scope; every construction in this toolkit works at desk scale.
pub const MAX_MODULUS: u32 = 1 << 16;

/// Returns true when `p` fits the supported modulus range and is prime.
pub fn is_supported_prime(p: u32) -> bool {
    if !(2..MAX_MODULUS).contains(&p) {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn check_modulus(p: u16) -> Result<()> {
    if is_supported_prime(p as u32) {
        Ok(())
    } else {
        Err(Error::InvalidModulus(p as u64))
    }
}

/// A single element of GF(p). Mostly a convenience for scalar arithmetic;
/// matrices store raw values with one shared modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldElem {
    value: u16,
    modulus: u16,
}

impl FieldElem {
    pub fn new(value: u64, modulus: u16) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(FieldElem {
            value: (value % modulus as u64) as u16,
            modulus,
        })
    }

    pub fn value(&self) -> u16 {
        self.value
    }

    pub fn modulus(&self) -> u16 {
        self.modulus
    }

    fn same_field(&self, other: &FieldElem) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(FieldElem {
            value: ((self.value as u32 + other.value as u32) % self.modulus as u32) as u16,
            modulus: self.modulus,
        })
    }

    pub fn sub(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        let p = self.modulus as u32;
        Ok(FieldElem {
            value: ((self.value as u32 + p - other.value as u32) % p) as u16,
            modulus: self.modulus,
        })
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_field(other)?;
        Ok(FieldElem {
            value: ((self.value as u32 * other.value as u32) % self.modulus as u32) as u16,
            modulus: self.modulus,
        })
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<FieldElem> {
        if self.value == 0 {
            return None;
        }
        Some(FieldElem {
            value: inv_mod(self.value, self.modulus),
            modulus: self.modulus,
        })
    }
}

/// Inverse of `a` mod prime `p` by extended Euclid. `a` must be nonzero mod p.
fn inv_mod(a: u16, p: u16) -> u16 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, a as i64 % p as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inverse of a non-unit");
    (t.rem_euclid(p as i64)) as u16
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Storage {
    /// GF(2): each row is `words_per_row` u64 words, bit `c % 64` of word
    /// `c / 64` holds column c.
    Packed {
        words_per_row: usize,
        words: Vec<u64>,
    },
    /// General prime: row-major values in `[0, p)`.
    Dense(Vec<u16>),
}

/// Dense matrix over GF(p). Operations return new matrices; values never
/// mutate after construction, so shared references are safe across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    p: u16,
    storage: Storage,
}

impl FieldMatrix {
    pub fn zero(rows: usize, cols: usize, p: u16) -> Result<Self> {
        check_modulus(p)?;
        let storage = if p == 2 {
            let wpr = cols.div_ceil(64).max(1);
            Storage::Packed {
                words_per_row: wpr,
                words: vec![0; wpr * rows],
            }
        } else {
            Storage::Dense(vec![0; rows * cols])
        };
        Ok(FieldMatrix {
            rows,
            cols,
            p,
            storage,
        })
    }

    pub fn identity(n: usize, p: u16) -> Result<Self> {
        let mut m = Self::zero(n, n, p)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Builds a matrix from row slices; values are reduced mod p.
    pub fn from_rows(rows: &[Vec<u16>], cols: usize, p: u16) -> Result<Self> {
        let mut m = Self::zero(rows.len(), cols, p)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v % p);
            }
        }
        Ok(m)
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        p: u16,
        mut f: impl FnMut(usize, usize) -> u16,
    ) -> Result<Self> {
        let mut m = Self::zero(rows, cols, p)?;
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c) % p);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u16 {
        self.p
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u16 {
        debug_assert!(r < self.rows && c < self.cols);
        match &self.storage {
            Storage::Packed {
                words_per_row,
                words,
            } => ((words[r * words_per_row + c / 64] >> (c % 64)) & 1) as u16,
            Storage::Dense(v) => v[r * self.cols + c],
        }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: u16) {
        debug_assert!(r < self.rows && c < self.cols, "index out of range");
        debug_assert!(value < self.p);
        match &mut self.storage {
            Storage::Packed {
                words_per_row,
                words,
            } => {
                let w = &mut words[r * *words_per_row + c / 64];
                let bit = 1u64 << (c % 64);
                if value == 0 {
                    *w &= !bit;
                } else {
                    *w |= bit;
                }
            }
            Storage::Dense(v) => v[r * self.cols + c] = value,
        }
    }

    pub fn row(&self, r: usize) -> Vec<u16> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn row_is_zero(&self, r: usize) -> bool {
        match &self.storage {
            Storage::Packed {
                words_per_row,
                words,
            } => words[r * words_per_row..(r + 1) * words_per_row]
                .iter()
                .all(|&w| w == 0),
            Storage::Dense(_) => (0..self.cols).all(|c| self.get(r, c) == 0),
        }
    }

    pub fn col_is_zero(&self, c: usize) -> bool {
        (0..self.rows).all(|r| self.get(r, c) == 0)
    }

    /// GF(2) fast path: row `r` as a single word. Requires p == 2 and
    /// cols <= 64.
    #[inline]
    pub fn row_word(&self, r: usize) -> u64 {
        match &self.storage {
            Storage::Packed {
                words_per_row,
                words,
            } => {
                debug_assert!(self.cols <= 64);
                words[r * words_per_row]
            }
            Storage::Dense(_) => unreachable!("row_word on a non-GF(2) matrix"),
        }
    }

    /// GF(2) fast path: self * v with v a bitmask over columns (bit j =
    /// column j). Output bit r is the parity of `row_r AND v`.
    #[inline]
    pub fn mul_bits(&self, v: u64) -> u64 {
        debug_assert!(self.p == 2 && self.cols <= 64 && self.rows <= 64);
        let mut out = 0u64;
        for r in 0..self.rows {
            out |= ((self.row_word(r) & v).count_ones() as u64 & 1) << r;
        }
        out
    }

    fn same_field(&self, other: &FieldMatrix) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                left: self.p,
                right: other.p,
            });
        }
        Ok(())
    }

    /// Exact matrix product over GF(p).
    pub fn mat_mul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = FieldMatrix::zero(self.rows, other.cols, self.p)?;
        let p = self.p as u64;
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc = (acc + self.get(r, k) as u64 * other.get(k, c) as u64) % p;
                }
                out.set(r, c, acc as u16);
            }
        }
        Ok(out)
    }

    /// Matrix-vector product; `v` has one entry per column.
    pub fn mul_vec(&self, v: &[u16]) -> Result<Vec<u16>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        let p = self.p as u64;
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = 0u64;
                for c in 0..self.cols {
                    acc = (acc + self.get(r, c) as u64 * v[c] as u64) % p;
                }
                acc as u16
            })
            .collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        match &mut self.storage {
            Storage::Packed {
                words_per_row,
                words,
            } => {
                let wpr = *words_per_row;
                for w in 0..wpr {
                    words.swap(a * wpr + w, b * wpr + w);
                }
            }
            Storage::Dense(v) => {
                for c in 0..self.cols {
                    v.swap(a * self.cols + c, b * self.cols + c);
                }
            }
        }
    }

    /// row[dst] -= factor * row[src]
    fn eliminate_row(&mut self, dst: usize, src: usize, factor: u16) {
        if factor == 0 {
            return;
        }
        match &mut self.storage {
            Storage::Packed {
                words_per_row,
                words,
            } => {
                // over GF(2) the only nonzero factor is 1: XOR the word slices
                let wpr = *words_per_row;
                let (src_off, dst_off) = (src * wpr, dst * wpr);
                for w in 0..wpr {
                    let s = words[src_off + w];
                    words[dst_off + w] ^= s;
                }
            }
            Storage::Dense(_) => {
                let p = self.p as u32;
                for c in 0..self.cols {
                    let v = (self.get(dst, c) as u32
                        + (p - factor as u32) * self.get(src, c) as u32)
                        % p;
                    self.set(dst, c, v as u16);
                }
            }
        }
    }

    fn scale_row(&mut self, r: usize, factor: u16) {
        if factor == 1 {
            return;
        }
        let p = self.p as u32;
        for c in 0..self.cols {
            let v = (self.get(r, c) as u32 * factor as u32) % p;
            self.set(r, c, v as u16);
        }
    }

    /// Reduced row echelon form together with the pivot columns.
    ///
    /// Pivot selection is deterministic: the leftmost column with a nonzero
    /// entry at or below the current row, swapping the topmost such row up.
    pub fn rref(&self) -> (FieldMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut cur = 0usize;
        for col in 0..m.cols {
            if cur == m.rows {
                break;
            }
            let Some(pr) = (cur..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            m.swap_rows(cur, pr);
            let lead = m.get(cur, col);
            if lead != 1 {
                m.scale_row(cur, inv_mod(lead, m.p));
            }
            for r in 0..m.rows {
                if r != cur {
                    let f = m.get(r, col);
                    m.eliminate_row(r, cur, f);
                }
            }
            pivots.push(col);
            cur += 1;
        }
        (m, pivots)
    }

    /// Number of pivots of the reduced row echelon form.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Solves A x = b, returning one solution (free variables fixed to zero)
    /// or `None` when the system is inconsistent.
    pub fn solve_affine(&self, b: &[u16]) -> Result<Option<Vec<u16>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "rhs length {} does not match {} rows",
                b.len(),
                self.rows
            )));
        }
        let mut aug = FieldMatrix::zero(self.rows, self.cols + 1, self.p)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if v != 0 {
                    aug.set(r, c, v);
                }
            }
            if b[r] != 0 {
                aug.set(r, self.cols, b[r] % self.p);
            }
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0u16; self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = red.get(row, self.cols);
        }
        Ok(Some(x))
    }

    /// Vertical stack: rows of `self` above rows of `other`.
    pub fn vstack(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "vstack column mismatch: {} vs {}",
                self.cols, other.cols
            )));
        }
        let mut out = FieldMatrix::zero(self.rows + other.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if v != 0 {
                    out.set(r, c, v);
                }
            }
        }
        for r in 0..other.rows {
            for c in 0..self.cols {
                let v = other.get(r, c);
                if v != 0 {
                    out.set(self.rows + r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut out = FieldMatrix::zero(self.cols, self.rows, self.p).expect("same modulus");
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if v != 0 {
                    out.set(c, r, v);
                }
            }
        }
        out
    }

    /// New matrix keeping only the given columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> FieldMatrix {
        let mut out = FieldMatrix::zero(self.rows, cols.len(), self.p).expect("same modulus");
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                let v = self.get(r, c);
                if v != 0 {
                    out.set(r, j, v);
                }
            }
        }
        out
    }

    /// New matrix keeping only the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FieldMatrix {
        let mut out = FieldMatrix::zero(rows.len(), self.cols, self.p).expect("same modulus");
        for (i, &r) in rows.iter().enumerate() {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if v != 0 {
                    out.set(i, c, v);
                }
            }
        }
        out
    }

    /// True when `v` (a row vector) lies in the row space of `self`.
    pub fn row_space_contains(&self, v: &[u16]) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        // v in rowspace(A)  <=>  A^T x = v is consistent
        Ok(self.transpose().solve_affine(v)?.is_some())
    }
}
