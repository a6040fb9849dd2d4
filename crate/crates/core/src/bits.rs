//! Bit-packed vectors and matrices over GF(2).
//!
//! Rows are packed into 64-bit words; elimination, products and rank all
//! work a word at a time. Shape mismatches are programmer errors and panic;
//! singular systems are domain outcomes and return `None`.

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A GF(2) row vector of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zero(len: usize) -> Self {
        BitVector { len, words: vec![0; words_for(len)] }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = BitVector::zero(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of '0'/'1' characters, index 0 first.
    pub fn from_bitstring(s: &str) -> Option<Self> {
        if !s.chars().all(|c| c == '0' || c == '1') {
            return None;
        }
        Some(BitVector::from_bits(
            &s.chars().map(|c| c == '1').collect::<Vec<_>>(),
        ))
    }

    pub fn random<R: rand::Rng>(rng: &mut R, len: usize) -> Self {
        let mut v = BitVector::zero(len);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.mask_tail();
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
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "vector length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Circular shift right by `j`: the bit at index i moves to (i + j) mod len.
    pub fn rotate_right(&self, j: usize) -> BitVector {
        let n = self.len;
        if n == 0 {
            return self.clone();
        }
        let j = j % n;
        let mut out = BitVector::zero(n);
        for i in 0..n {
            if self.get(i) {
                out.set((i + j) % n, true);
            }
        }
        out
    }

    /// Iterator over indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    /// Row vector times matrix.
    pub fn mul_matrix(&self, m: &BitMatrix) -> BitVector {
        assert_eq!(self.len, m.rows, "vector/matrix shape mismatch");
        let mut out = BitVector::zero(m.cols);
        for i in self.iter_ones() {
            for (o, w) in out.words.iter_mut().zip(m.row_words(i)) {
                *o ^= w;
            }
        }
        out
    }

    /// Concatenates vectors into one long vector.
    pub fn concat(parts: &[BitVector]) -> BitVector {
        let total = parts.iter().map(|p| p.len).sum();
        let mut out = BitVector::zero(total);
        let mut off = 0;
        for p in parts {
            for i in p.iter_ones() {
                out.set(off + i, true);
            }
            off += p.len;
        }
        out
    }

    /// Extracts `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVector::zero(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    /// Packs bits into bytes, bit i at byte i/8, bit position i%8.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in self.iter_ones() {
            out[i / 8] |= 1 << (i % 8);
        }
        out
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector({})", self.to_bitstring())
    }
}

/// A dense GF(2) matrix, row-major, rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        BitMatrix { rows, cols, wpr, words: vec![0; rows * wpr] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = BitMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &b) in row.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BitMatrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn random<R: rand::Rng>(rng: &mut R, rows: usize, cols: usize) -> Self {
        let mut m = BitMatrix::zero(rows, cols);
        for r in 0..rows {
            for w in 0..m.wpr {
                m.words[r * m.wpr + w] = rng.gen();
            }
            m.mask_row_tail(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        (self.words[r * self.wpr + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let mask = 1u64 << (c % WORD);
        let w = &mut self.words[r * self.wpr + c / WORD];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector { len: self.cols, words: self.row_words(r).to_vec() }
    }

    pub fn set_row(&mut self, r: usize, v: &BitVector) {
        assert_eq!(v.len, self.cols, "row length mismatch");
        self.words[r * self.wpr..(r + 1) * self.wpr].copy_from_slice(&v.words);
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.wpr..(r + 1) * self.wpr]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let (a, b) = (src * self.wpr, dst * self.wpr);
        for k in 0..self.wpr {
            let v = self.words[a + k];
            self.words[b + k] ^= v;
        }
    }

    fn mask_row_tail(&mut self, r: usize) {
        let rem = self.cols % WORD;
        if rem != 0 {
            self.words[r * self.wpr + self.wpr - 1] &= (1u64 << rem) - 1;
        }
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "matrix shape mismatch in add"
        );
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch in mul");
        let mut out = BitMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            let base = i * out.wpr;
            for k in self.row(i).iter_ones() {
                let src = k * other.wpr;
                for w in 0..other.wpr {
                    out.words[base + w] ^= other.words[src + w];
                }
            }
        }
        out
    }

    /// Kronecker product.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zero(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    for r in 0..other.rows {
                        for c in 0..other.cols {
                            if other.get(r, c) {
                                out.set(i * other.rows + r, j * other.cols + c, true);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row(i).iter_ones() {
                out.set(j, i, true);
            }
        }
        out
    }

    /// Stacks matrices vertically. All parts must share a column count.
    pub fn vstack(parts: &[BitMatrix]) -> BitMatrix {
        let cols = parts.first().map_or(0, |p| p.cols);
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = BitMatrix::zero(rows, cols);
        let mut r = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "column mismatch in vstack");
            out.words[r * out.wpr..(r + p.rows) * out.wpr].copy_from_slice(&p.words);
            r += p.rows;
        }
        out
    }

    /// Juxtaposes matrices horizontally. All parts must share a row count.
    pub fn hstack(parts: &[BitMatrix]) -> BitMatrix {
        let rows = parts.first().map_or(0, |p| p.rows);
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = BitMatrix::zero(rows, cols);
        let mut off = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "row mismatch in hstack");
            for i in 0..rows {
                for j in p.row(i).iter_ones() {
                    out.set(i, off + j, true);
                }
            }
            off += p.cols;
        }
        out
    }

    /// Copies `block` into self with its (0,0) entry at (r0, c0).
    pub fn paste(&mut self, r0: usize, c0: usize, block: &BitMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in block.row(i).iter_ones() {
                self.set(r0 + i, c0 + j, true);
            }
        }
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zero(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            out.words[i * out.wpr..(i + 1) * out.wpr].copy_from_slice(self.row_words(r));
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate(None)
    }

    /// Gaussian elimination in place; returns the rank. If `cap` is given,
    /// stops early once that many pivots are found.
    fn eliminate(&mut self, cap: Option<usize>) -> usize {
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows || cap.is_some_and(|c| pivot_row >= c) {
                break;
            }
            let Some(r) = (pivot_row..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            if r != pivot_row {
                self.swap_rows(r, pivot_row);
            }
            for other in 0..self.rows {
                if other != pivot_row && self.get(other, col) {
                    self.xor_row_into(pivot_row, other);
                }
            }
            pivot_row += 1;
        }
        pivot_row
    }

    /// Rank, stopping as soon as `threshold` pivots are found. Returns true
    /// iff rank >= threshold.
    pub fn rank_at_least(&self, threshold: usize) -> bool {
        if threshold == 0 {
            return true;
        }
        self.clone().eliminate(Some(threshold)) >= threshold
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.wpr {
            self.words.swap(a * self.wpr + k, b * self.wpr + k);
        }
    }

    /// Solves self · X = target by Gauss–Jordan elimination on the augmented
    /// matrix. Free variables are zeroed, so the solution is deterministic.
    /// Returns `None` when the system is inconsistent.
    pub fn solve_right(&self, target: &BitMatrix) -> Option<BitMatrix> {
        assert_eq!(self.rows, target.rows, "row mismatch in solve_right");
        let mut aug = BitMatrix::hstack(&[self.clone(), target.clone()]);
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == aug.rows {
                break;
            }
            let Some(r) = (pivot_row..aug.rows).find(|&r| aug.get(r, col)) else {
                continue;
            };
            aug.swap_rows(r, pivot_row);
            for other in 0..aug.rows {
                if other != pivot_row && aug.get(other, col) {
                    aug.xor_row_into(pivot_row, other);
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        // Rows below the pivots must have an all-zero target part.
        for r in pivot_row..aug.rows {
            for c in self.cols..self.cols + target.cols {
                if aug.get(r, c) {
                    return None;
                }
            }
        }
        let mut x = BitMatrix::zero(self.cols, target.cols);
        for &(r, c) in &pivots {
            for j in 0..target.cols {
                if aug.get(r, self.cols + j) {
                    x.set(c, j, true);
                }
            }
        }
        Some(x)
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn invert(&self) -> Option<BitMatrix> {
        assert_eq!(self.rows, self.cols, "invert requires a square matrix");
        if self.rank() < self.rows {
            return None;
        }
        self.solve_right(&BitMatrix::identity(self.rows))
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.row(i).to_bitstring())?;
        }
        write!(f, "]")
    }
}
