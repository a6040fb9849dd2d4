//! GF(2)[x] polynomials and the fields GF(2^{L-1}) used for scalar codes.
//!
//! A block length L is admissible when L is prime and 2 is a primitive root
//! mod L; then f(x) = x^{L-1} + ... + x + 1 is irreducible over GF(2) and
//! GF(2)[x]/(f) is a field in which x has multiplicative order L.

use crate::bits::BitVector;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("block length {0} is not admissible (need a prime with primitive root 2)")]
    Inadmissible(usize),
}

/// A polynomial over GF(2), bit i = coefficient of x^i.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly2 {
    words: Vec<u64>, // trimmed: last word nonzero, or empty for the zero poly
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { words: Vec::new() }
    }

    pub fn one() -> Self {
        Poly2 { words: vec![1] }
    }

    /// x^k
    pub fn x_pow(k: usize) -> Self {
        let mut words = vec![0u64; k / 64 + 1];
        words[k / 64] = 1u64 << (k % 64);
        Poly2 { words }
    }

    pub fn from_coeff_indices(indices: &[usize]) -> Self {
        let mut p = Poly2::zero();
        for &i in indices {
            p.flip(i);
        }
        p
    }

    pub fn from_bitvector(v: &BitVector) -> Self {
        let mut p = Poly2 { words: v.words().to_vec() };
        p.trim();
        p
    }

    /// Low `len` coefficients as a bit vector.
    pub fn to_bitvector(&self, len: usize) -> BitVector {
        assert!(self.degree().is_none_or(|d| d < len), "polynomial does not fit");
        let mut v = BitVector::zero(len);
        for i in 0..len {
            if self.coeff(i) {
                v.set(i, true);
            }
        }
        v
    }

    fn flip(&mut self, i: usize) {
        if self.words.len() <= i / 64 {
            self.words.resize(i / 64 + 1, 0);
        }
        self.words[i / 64] ^= 1u64 << (i % 64);
        self.trim();
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - last.leading_zeros() as usize)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut words = self.words.clone();
        if words.len() < other.words.len() {
            words.resize(other.words.len(), 0);
        }
        for (i, w) in other.words.iter().enumerate() {
            words[i] ^= w;
        }
        let mut p = Poly2 { words };
        p.trim();
        p
    }

    pub fn shl(&self, k: usize) -> Poly2 {
        if self.is_zero() {
            return Poly2::zero();
        }
        let (wshift, bshift) = (k / 64, k % 64);
        let mut words = vec![0u64; self.words.len() + wshift + 1];
        for (i, &w) in self.words.iter().enumerate() {
            words[i + wshift] |= w << bshift;
            if bshift != 0 {
                words[i + wshift + 1] |= w >> (64 - bshift);
            }
        }
        let mut p = Poly2 { words };
        p.trim();
        p
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut acc = Poly2::zero();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                acc = acc.add(&other.shl(wi * 64 + b));
            }
        }
        acc
    }

    /// (quotient, remainder) of self / divisor. Panics on a zero divisor.
    pub fn divrem(&self, divisor: &Poly2) -> (Poly2, Poly2) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let mut rem = self.clone();
        let mut quot = Poly2::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            quot.flip(shift);
            rem = rem.add(&divisor.shl(shift));
        }
        (quot, rem)
    }

    pub fn rem(&self, modulus: &Poly2) -> Poly2 {
        self.divrem(modulus).1
    }
}

impl std::fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = (0..=self.degree().unwrap())
            .filter(|&i| self.coeff(i))
            .map(|i| match i {
                0 => "1".into(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

/// Greatest common divisor in GF(2)[x]. Panics if both inputs are zero.
pub fn poly_gcd(a: &Poly2, b: &Poly2) -> Poly2 {
    assert!(
        !(a.is_zero() && b.is_zero()),
        "gcd of two zero polynomials is undefined"
    );
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a
}

/// True iff `l` is a prime with primitive root 2, i.e. ord_l(2) = l - 1.
pub fn is_prime_with_primitive_root_2(l: usize) -> bool {
    if l < 3 {
        return false;
    }
    let mut d = 2;
    while d * d <= l {
        if l.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    let mut pow = 1u64;
    for k in 1..l {
        pow = pow * 2 % l as u64;
        if pow == 1 {
            return k == l - 1;
        }
    }
    false
}

/// Admissible block lengths up to and including `max`.
pub fn admissible_lengths(max: usize) -> Vec<usize> {
    (3..=max).filter(|&l| is_prime_with_primitive_root_2(l)).collect()
}

/// An element of GF(2^{L-1}), stored as its polynomial representative of
/// degree < L-1 in the generator alpha (the class of x).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement(Poly2);

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement(Poly2::zero())
    }

    pub fn one() -> Self {
        FieldElement(Poly2::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn poly(&self) -> &Poly2 {
        &self.0
    }
}

impl std::fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Arithmetic context for GF(2^{L-1}) with the all-ones modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    l: usize,
    modulus: Poly2,
}

impl FieldCtx {
    pub fn new(l: usize) -> Result<Self, FieldError> {
        if !is_prime_with_primitive_root_2(l) {
            return Err(FieldError::Inadmissible(l));
        }
        // f(x) = x^{l-1} + ... + x + 1
        let modulus = Poly2::from_coeff_indices(&(0..l).collect::<Vec<_>>());
        Ok(FieldCtx { l, modulus })
    }

    /// The block length L.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Bits per field element (the extension degree L-1).
    pub fn bits(&self) -> usize {
        self.l - 1
    }

    pub fn modulus(&self) -> &Poly2 {
        &self.modulus
    }

    pub fn element(&self, p: Poly2) -> FieldElement {
        FieldElement(p.rem(&self.modulus))
    }

    /// The generator alpha (class of x), of multiplicative order L.
    pub fn alpha(&self) -> FieldElement {
        self.element(Poly2::x_pow(1))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.add(&b.0))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement(a.0.mul(&b.0).rem(&self.modulus))
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = FieldElement::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// alpha^k with the exponent reduced mod L (alpha has order L).
    pub fn alpha_pow(&self, k: i64) -> FieldElement {
        let k = k.rem_euclid(self.l as i64) as u64;
        self.pow(&self.alpha(), k)
    }

    /// Multiplicative inverse by extended Euclid. `None` for zero.
    pub fn inv(&self, a: &FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        let (mut r0, mut r1) = (self.modulus.clone(), a.0.clone());
        let (mut s0, mut s1) = (Poly2::zero(), Poly2::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.add(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        debug_assert_eq!(r0.degree(), Some(0), "modulus is irreducible");
        Some(FieldElement(s0.rem(&self.modulus)))
    }
}

/// A binary coefficient vector of length L with weight at most (L-1)/2,
/// interpreted either as sum(a_j alpha^j) in GF(2^{L-1}) or as the circulant
/// sum(a_j C_L^j).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightBoundedPoly {
    bits: BitVector,
}

impl WeightBoundedPoly {
    pub fn new(bits: BitVector) -> Self {
        let l = bits.len();
        assert!(l >= 3 && l % 2 == 1, "coefficient length must be odd and >= 3");
        assert!(
            bits.weight() <= (l - 1) / 2,
            "weight {} exceeds bound {}",
            bits.weight(),
            (l - 1) / 2
        );
        WeightBoundedPoly { bits }
    }

    pub fn zero(l: usize) -> Self {
        WeightBoundedPoly::new(BitVector::zero(l))
    }

    pub fn from_indices(l: usize, indices: &[usize]) -> Self {
        let mut v = BitVector::zero(l);
        for &i in indices {
            v.set(i, true);
        }
        WeightBoundedPoly::new(v)
    }

    pub fn l(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.weight()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    /// Largest exponent with a nonzero coefficient, or `None` if zero.
    pub fn degree(&self) -> Option<usize> {
        self.bits.iter_ones().last()
    }

    /// Evaluates sum(a_j alpha^{power * j}).
    pub fn eval(&self, ctx: &FieldCtx, power: i64) -> FieldElement {
        assert_eq!(self.l(), ctx.l(), "coefficient length must equal L");
        let mut acc = FieldElement::zero();
        for j in self.bits.iter_ones() {
            acc = ctx.add(&acc, &ctx.alpha_pow(power * j as i64));
        }
        acc
    }
}

impl std::fmt::Debug for WeightBoundedPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WeightBoundedPoly({})", self.bits.to_bitstring())
    }
}

/// Canonical weight-bounded representative of a field element: take the
/// length-L coefficient vector with a_{L-1} = 0 and complement all L
/// coefficients if the weight exceeds (L-1)/2. Complementing preserves the
/// value because sum_{j=0}^{L-1} alpha^j = 0.
pub fn canonical_weight_rep(ctx: &FieldCtx, a: &FieldElement) -> WeightBoundedPoly {
    let l = ctx.l();
    let mut bits = a.poly().to_bitvector(l);
    debug_assert!(!bits.get(l - 1));
    if bits.weight() > (l - 1) / 2 {
        for i in 0..l {
            let b = bits.get(i);
            bits.set(i, !b);
        }
    }
    WeightBoundedPoly::new(bits)
}

/// Checks the Vandermonde diagonalization of the cyclic-shift matrix over
/// GF(2^{L-1}): with V[i][j] = alpha^{ij}, W[i][j] = alpha^{-ij} and
/// D = diag(alpha^i), V·W = I and V·D^p·W is the 0/1 matrix of the p-th
/// cyclic-shift power for every 0 <= p < L.
pub fn verify_diagonalization(ctx: &FieldCtx) -> bool {
    use crate::fieldmat::FieldMat;
    let l = ctx.l();
    let v = FieldMat::from_fn(l, l, |i, j| ctx.alpha_pow((i * j) as i64));
    let w = FieldMat::from_fn(l, l, |i, j| ctx.alpha_pow(-((i * j) as i64)));
    if !v.mul(ctx, &w).is_identity() {
        return false;
    }
    for p in 0..l {
        let d = FieldMat::from_fn(l, l, |i, j| {
            if i == j {
                ctx.alpha_pow((p * i) as i64)
            } else {
                FieldElement::zero()
            }
        });
        let m = v.mul(ctx, &d).mul(ctx, &w);
        for i in 0..l {
            for j in 0..l {
                let expect = j == (i + p) % l;
                let got = m.get(i, j);
                let ok = if expect { got == &FieldElement::one() } else { got.is_zero() };
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}
