//! L x L binary circulant matrices, stored by their first row.
//!
//! A circulant sum(a_j C_L^j) is identified with the coefficient vector
//! (a_0, ..., a_{L-1}), where C_L is the cyclic-shift matrix with ones at
//! (i, i+1 mod L). Applying a circulant to a row vector is a XOR of circular
//! shifts; applications can charge an XOR counter with L * (weight - 1)
//! binary operations (single shifts are free rewiring).

use crate::bits::{BitMatrix, BitVector};
use crate::field::{poly_gcd, Poly2, WeightBoundedPoly};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Circulant {
    coeffs: BitVector,
}

impl Circulant {
    pub fn zero(l: usize) -> Self {
        Circulant { coeffs: BitVector::zero(l) }
    }

    pub fn identity(l: usize) -> Self {
        Circulant::shift_power(l, 0)
    }

    /// C_L^j (exponent reduced mod L).
    pub fn shift_power(l: usize, j: usize) -> Self {
        assert!(l > 0);
        let mut coeffs = BitVector::zero(l);
        coeffs.set(j % l, true);
        Circulant { coeffs }
    }

    pub fn from_coeffs(coeffs: BitVector) -> Self {
        Circulant { coeffs }
    }

    pub fn from_indices(l: usize, indices: &[usize]) -> Self {
        let mut coeffs = BitVector::zero(l);
        for &i in indices {
            coeffs.set(i % l, true);
        }
        Circulant { coeffs }
    }

    /// Reads a coefficient vector as a circulant of the same length.
    pub fn from_weight_bounded(p: &WeightBoundedPoly) -> Self {
        Circulant { coeffs: p.bits().clone() }
    }

    /// Recognizes a dense matrix as a circulant; `None` if it is not one.
    pub fn from_dense(m: &BitMatrix) -> Option<Self> {
        let l = m.rows();
        if m.cols() != l || l == 0 {
            return None;
        }
        let coeffs = m.row(0);
        for i in 1..l {
            if m.row(i) != coeffs.rotate_right(i) {
                return None;
            }
        }
        Some(Circulant { coeffs })
    }

    pub fn l(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &BitVector {
        &self.coeffs
    }

    pub fn weight(&self) -> usize {
        self.coeffs.weight()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn add(&self, other: &Circulant) -> Circulant {
        assert_eq!(self.l(), other.l(), "circulant size mismatch");
        let mut coeffs = self.coeffs.clone();
        coeffs.xor_assign(&other.coeffs);
        Circulant { coeffs }
    }

    /// Product in the circulant ring GF(2)[x]/(x^L + 1): cyclic convolution
    /// of the coefficient vectors.
    pub fn mul(&self, other: &Circulant) -> Circulant {
        assert_eq!(self.l(), other.l(), "circulant size mismatch");
        let mut coeffs = BitVector::zero(self.l());
        for i in self.coeffs.iter_ones() {
            coeffs.xor_assign(&other.coeffs.rotate_right(i));
        }
        Circulant { coeffs }
    }

    /// Row vector times circulant: XOR of circular right-shifts of `v`.
    pub fn apply(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.l(), "vector length mismatch");
        let mut out = BitVector::zero(self.l());
        for j in self.coeffs.iter_ones() {
            out.xor_assign(&v.rotate_right(j));
        }
        out
    }

    /// `apply` that charges `xors` with L * (weight - 1) for weight >= 1:
    /// combining w shifted copies of an L-bit unit costs (w - 1) * L XORs,
    /// and a single shift costs nothing.
    pub fn apply_counted(&self, v: &BitVector, xors: &mut u64) -> BitVector {
        let w = self.weight();
        if w >= 1 {
            *xors += (self.l() as u64) * (w as u64 - 1);
        }
        self.apply(v)
    }

    pub fn to_dense(&self) -> BitMatrix {
        let l = self.l();
        let mut m = BitMatrix::zero(l, l);
        for i in 0..l {
            m.set_row(i, &self.coeffs.rotate_right(i));
        }
        m
    }

    /// Rank over GF(2): L - deg(gcd(x^L + 1, sum a_j x^j)); the zero
    /// circulant has rank 0 (its gcd is x^L + 1 itself).
    pub fn rank(&self) -> usize {
        let l = self.l();
        let xl1 = Poly2::x_pow(l).add(&Poly2::one());
        if self.is_zero() {
            return 0;
        }
        let g = poly_gcd(&xl1, &Poly2::from_bitvector(&self.coeffs));
        l - g.degree().expect("gcd of nonzero inputs is nonzero")
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.l()
    }
}

impl std::fmt::Debug for Circulant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Circulant({})", self.coeffs.to_bitstring())
    }
}

/// Substitutes the cyclic-shift matrix into a weight-bounded coefficient
/// vector: g(x) -> g(C_L).
pub fn substitute(p: &WeightBoundedPoly) -> Circulant {
    Circulant::from_weight_bounded(p)
}

/// Uniform sample from the L + 1 degree-at-most-one circulants
/// {0, I, C_L, ..., C_L^{L-1}}.
pub fn random_degree1<R: rand::Rng>(rng: &mut R, l: usize) -> Circulant {
    let k = rng.gen_range(0..=l);
    if k == 0 {
        Circulant::zero(l)
    } else {
        Circulant::shift_power(l, k - 1)
    }
}
