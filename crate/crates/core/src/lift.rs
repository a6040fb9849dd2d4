//! Fractional vector codes over GF(2): per-edge-pair matrix kernels
//! (circulant, permutation, or dense), per-source generator matrices mapping
//! L'-bit message units into L-bit edge units, per-receiver decoders, exact
//! verification of end-to-end recovery, and the lift that turns a scalar
//! solution of degree delta into an (L-1, L)-fractional code whose kernels
//! are weight-delta circulants.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bits::{BitMatrix, BitVector};
use crate::circulant::{substitute, Circulant};
use crate::network::{EdgeId, Network, Receiver};
use crate::scalar::{PolyMatrix, ScalarCode, ScalarError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LiftError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("unit sizes ({lprime}, {l}) are not a valid fractional pair")]
    BadRatio { lprime: usize, l: usize },
    #[error("edges {0:?} and {1:?} are not an adjacent pair")]
    NotAdjacent(EdgeId, EdgeId),
    #[error("kernel is {found}-dimensional, expected {expected}")]
    KernelSize { expected: usize, found: usize },
    #[error("kernel is not a valid permutation")]
    BadPermutation,
    #[error("generator for source {index} must be {rows}x{cols}")]
    GeneratorShape { index: usize, rows: usize, cols: usize },
    #[error("decoder for receiver {receiver} has the wrong shape")]
    DecoderShape { receiver: usize },
    #[error("no decoder assigned for receiver {0}")]
    MissingDecoder(usize),
}

/// A local encoding kernel: an L x L binary matrix acting on row vectors,
/// stored in the cheapest faithful form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kernel {
    /// Sum of cyclic-shift powers; the circular-shift family.
    Circulant(Circulant),
    /// Column permutation: entry (i, perm[i]) is one.
    Permutation(Vec<usize>),
    /// Arbitrary binary matrix.
    Dense(BitMatrix),
}

impl Kernel {
    pub fn l(&self) -> usize {
        match self {
            Kernel::Circulant(c) => c.l(),
            Kernel::Permutation(p) => p.len(),
            Kernel::Dense(m) => m.rows(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Kernel::Circulant(c) => c.is_zero(),
            Kernel::Permutation(_) => false,
            Kernel::Dense(m) => m.is_zero(),
        }
    }

    /// Nonzero coefficient count for circulants; the natural analogue for
    /// the other forms (a permutation has one unit per row, a dense kernel
    /// is only bounded by its dimension).
    pub fn weight(&self) -> usize {
        match self {
            Kernel::Circulant(c) => c.weight(),
            Kernel::Permutation(_) => 1,
            Kernel::Dense(m) => m.rows(),
        }
    }

    /// Row vector times the kernel matrix.
    pub fn apply(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.l(), "unit length mismatch");
        match self {
            Kernel::Circulant(c) => c.apply(v),
            Kernel::Permutation(p) => {
                let mut out = BitVector::zero(v.len());
                for i in v.iter_ones() {
                    out.set(p[i], true);
                }
                out
            }
            Kernel::Dense(m) => v.mul_matrix(m),
        }
    }

    /// `apply` while charging XOR costs: a weight-w circulant combines w
    /// shifted copies for L(w-1) binary operations, a permutation is pure
    /// wiring, and a dense kernel combines one row per set input bit.
    pub fn apply_counted(&self, v: &BitVector, xors: &mut u64) -> BitVector {
        match self {
            Kernel::Circulant(c) => c.apply_counted(v, xors),
            Kernel::Permutation(_) => self.apply(v),
            Kernel::Dense(m) => {
                let terms = v.weight();
                if terms > 1 {
                    *xors += ((terms - 1) * m.cols()) as u64;
                }
                self.apply(v)
            }
        }
    }

    pub fn to_dense(&self) -> BitMatrix {
        match self {
            Kernel::Circulant(c) => c.to_dense(),
            Kernel::Permutation(p) => {
                BitMatrix::from_fn(p.len(), p.len(), |r, c| p[r] == c)
            }
            Kernel::Dense(m) => m.clone(),
        }
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&j| j < p.len() && !std::mem::replace(&mut seen[j], true))
}

/// The L x (L-1) padding-removal matrix: an all-ones row on top of the
/// identity. Every column has even weight, so the one message dimension
/// sacrificed by the (L-1, L) rate is exactly the all-ones direction that
/// circulant decoding cannot pin down.
pub fn itilde(l: usize) -> BitMatrix {
    assert!(l >= 2);
    BitMatrix::from_fn(l, l - 1, |r, c| r == 0 || r == c + 1)
}

/// Per-receiver decoding map from the |In(t)| received L-bit units to the
/// omega_t demanded L'-bit units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoder {
    /// Circulant stage followed by the implicit padding-removal stage: the
    /// received units pass through an |In(t)| x omega_t grid of circulant
    /// blocks (row-major), then each output unit drops to L-1 bits through
    /// `itilde`. Only meaningful when L' = L-1.
    Staged { in_units: usize, out_units: usize, blocks: Vec<Circulant> },
    /// Arbitrary |In(t)|L x omega_t L' binary matrix.
    Dense(BitMatrix),
}

impl Decoder {
    /// Builds the circulant stage from a matrix of weight-bounded
    /// coefficient vectors by substituting the cyclic-shift matrix.
    pub fn staged_from_poly(m: &PolyMatrix) -> Decoder {
        let mut blocks = Vec::with_capacity(m.rows() * m.cols());
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                blocks.push(substitute(m.get(r, c)));
            }
        }
        Decoder::Staged { in_units: m.rows(), out_units: m.cols(), blocks }
    }

    pub fn block(&self, r: usize, c: usize) -> Option<&Circulant> {
        match self {
            Decoder::Staged { out_units, blocks, .. } => blocks.get(r * out_units + c),
            Decoder::Dense(_) => None,
        }
    }

    /// The full |In(t)|L x omega_t L' matrix, with the padding-removal
    /// stage composed in for the staged form.
    pub fn to_dense(&self, l: usize) -> BitMatrix {
        match self {
            Decoder::Staged { in_units, out_units, blocks } => {
                let mut stage = BitMatrix::zero(in_units * l, out_units * l);
                for r in 0..*in_units {
                    for c in 0..*out_units {
                        stage.paste(r * l, c * l, &blocks[r * out_units + c].to_dense());
                    }
                }
                stage.mul(&BitMatrix::identity(*out_units).kron(&itilde(l)))
            }
            Decoder::Dense(m) => m.clone(),
        }
    }
}

/// An (L', L)-fractional vector code on a network: kernels on adjacent edge
/// pairs, one generator per source, and optional per-receiver decoders.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalCode {
    net: Network,
    l: usize,
    lprime: usize,
    kernels: BTreeMap<(EdgeId, EdgeId), Kernel>,
    gs: Vec<BitMatrix>,
    decoders: BTreeMap<usize, Decoder>,
}

/// The default generator for a source with `units` out-edges: each L'-bit
/// message unit is left-padded with one zero bit per lost dimension.
fn default_generator(units: usize, l: usize, lprime: usize) -> BitMatrix {
    let pad = BitMatrix::from_fn(lprime, l, |r, c| c >= l - lprime && r == c - (l - lprime));
    BitMatrix::identity(units).kron(&pad)
}

impl FractionalCode {
    pub fn new(net: Network, l: usize, lprime: usize) -> Result<Self, LiftError> {
        if lprime == 0 || lprime > l {
            return Err(LiftError::BadRatio { lprime, l });
        }
        let gs = net
            .sources()
            .iter()
            .map(|&s| default_generator(net.out_edges(s).len(), l, lprime))
            .collect();
        Ok(FractionalCode { net, l, lprime, kernels: BTreeMap::new(), gs, decoders: BTreeMap::new() })
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn lprime(&self) -> usize {
        self.lprime
    }

    pub fn set_kernel(&mut self, d: EdgeId, e: EdgeId, k: Kernel) -> Result<(), LiftError> {
        if self.net.head(d) != self.net.tail(e) {
            return Err(LiftError::NotAdjacent(d, e));
        }
        if k.l() != self.l {
            return Err(LiftError::KernelSize { expected: self.l, found: k.l() });
        }
        if let Kernel::Dense(m) = &k {
            if m.rows() != self.l || m.cols() != self.l {
                return Err(LiftError::KernelSize { expected: self.l, found: m.cols() });
            }
        }
        if let Kernel::Permutation(p) = &k {
            if !is_permutation(p) {
                return Err(LiftError::BadPermutation);
            }
        }
        if k.is_zero() {
            self.kernels.remove(&(d, e));
        } else {
            self.kernels.insert((d, e), k);
        }
        Ok(())
    }

    pub fn kernel(&self, d: EdgeId, e: EdgeId) -> Kernel {
        self.kernels
            .get(&(d, e))
            .cloned()
            .unwrap_or_else(|| Kernel::Circulant(Circulant::zero(self.l)))
    }

    /// Nonzero kernels in deterministic (d, e) order.
    pub fn kernels(&self) -> impl Iterator<Item = (EdgeId, EdgeId, &Kernel)> {
        self.kernels.iter().map(|(&(d, e), k)| (d, e, k))
    }

    /// Largest kernel weight.
    pub fn degree(&self) -> usize {
        self.kernels.values().map(|k| k.weight()).max().unwrap_or(0)
    }

    pub fn generator(&self, source: usize) -> &BitMatrix {
        &self.gs[source]
    }

    pub fn set_generator(&mut self, source: usize, g: BitMatrix) -> Result<(), LiftError> {
        let units = self.net.out_edges(self.net.sources()[source]).len();
        let (rows, cols) = (units * self.lprime, units * self.l);
        if g.rows() != rows || g.cols() != cols {
            return Err(LiftError::GeneratorShape { index: source, rows, cols });
        }
        self.gs[source] = g;
        Ok(())
    }

    pub fn decoder(&self, receiver: usize) -> Option<&Decoder> {
        self.decoders.get(&receiver)
    }

    pub fn set_decoder(&mut self, receiver: usize, d: Decoder) -> Result<(), LiftError> {
        let r = &self.net.receivers()[receiver];
        let in_units = self.net.in_edges(r.node).len();
        let out_units = self.net.omega_t(r);
        let ok = match &d {
            Decoder::Staged { in_units: iu, out_units: ou, blocks } => {
                self.lprime + 1 == self.l
                    && *iu == in_units
                    && *ou == out_units
                    && blocks.len() == iu * ou
                    && blocks.iter().all(|b| b.l() == self.l)
            }
            Decoder::Dense(m) => {
                m.rows() == in_units * self.l && m.cols() == out_units * self.lprime
            }
        };
        if !ok {
            return Err(LiftError::DecoderShape { receiver });
        }
        self.decoders.insert(receiver, d);
        Ok(())
    }

    /// Global vector kernels, one omega*L x L matrix per edge in canonical
    /// edge order: source out-edge i is the i-th unit block column, and
    /// every other edge sums its tail's incoming global kernels through the
    /// local kernels.
    pub fn vector_global_kernels(&self) -> Vec<BitMatrix> {
        let omega = self.net.omega();
        let l = self.l;
        let mut f: Vec<BitMatrix> = Vec::with_capacity(self.net.edge_count());
        for (i, e) in self.net.edge_ids().enumerate() {
            if self.net.is_source_edge(e) {
                let mut unit = BitMatrix::zero(omega * l, l);
                unit.paste(i * l, 0, &BitMatrix::identity(l));
                f.push(unit);
                continue;
            }
            let mut m = BitMatrix::zero(omega * l, l);
            for &d in self.net.in_edges(self.net.tail(e)) {
                let k = match self.kernels.get(&(d, e)) {
                    Some(k) => k,
                    None => continue,
                };
                for r in 0..omega * l {
                    let mut row = m.row(r);
                    row.xor_assign(&k.apply(&f[d.index()].row(r)));
                    m.set_row(r, &row);
                }
            }
            f.push(m);
        }
        f
    }

    /// Block-diagonal stack of all source generators (omega L' x omega L).
    pub fn generator_blockdiag(&self) -> BitMatrix {
        let omega = self.net.omega();
        let mut g = BitMatrix::zero(omega * self.lprime, omega * self.l);
        let mut unit = 0;
        for gs in &self.gs {
            g.paste(unit * self.lprime, unit * self.l, gs);
            unit += gs.rows() / self.lprime;
        }
        g
    }

    /// Horizontal stack of the receiver's incoming global kernels, premapped
    /// by the source generators: message bits to received bits.
    fn received_map(&self, f: &[BitMatrix], r: &Receiver) -> BitMatrix {
        let cols: Vec<BitMatrix> =
            self.net.in_edges(r.node).iter().map(|d| f[d.index()].clone()).collect();
        self.generator_blockdiag().mul(&BitMatrix::hstack(&cols))
    }

    /// What perfect recovery looks like for receiver `r`: identity blocks
    /// carrying each demanded unit, zero rows everywhere else (traffic from
    /// undemanded sources must cancel entirely).
    fn demand_target(&self, r: &Receiver) -> BitMatrix {
        let omega = self.net.omega();
        let lp = self.lprime;
        let mut offsets = Vec::with_capacity(self.net.sources().len());
        let mut acc = 0;
        for &s in self.net.sources() {
            offsets.push(acc);
            acc += self.net.out_edges(s).len();
        }
        let mut demanded_units = Vec::new();
        for &p in &r.demands {
            let width = self.net.out_edges(self.net.sources()[p]).len();
            demanded_units.extend(offsets[p]..offsets[p] + width);
        }
        let mut t = BitMatrix::zero(omega * lp, demanded_units.len() * lp);
        for (k, unit) in demanded_units.into_iter().enumerate() {
            t.paste(unit * lp, k * lp, &BitMatrix::identity(lp));
        }
        t
    }

    /// Exact end-to-end check for one receiver: generator, then global
    /// kernels, then the stored decoder must reproduce the demanded units.
    pub fn verify_receiver(&self, f: &[BitMatrix], receiver: usize) -> Result<bool, LiftError> {
        let r = &self.net.receivers()[receiver];
        let d = self.decoders.get(&receiver).ok_or(LiftError::MissingDecoder(receiver))?;
        let got = self.received_map(f, r).mul(&d.to_dense(self.l));
        Ok(got == self.demand_target(r))
    }

    /// Verifies every receiver; true only if all of them decode exactly.
    pub fn verify_all(&self) -> Result<bool, LiftError> {
        let f = self.vector_global_kernels();
        for t in 0..self.net.receivers().len() {
            if !self.verify_receiver(&f, t)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether some decoder exists for the receiver, irrespective of any
    /// stored one.
    pub fn solvable_receiver(&self, f: &[BitMatrix], receiver: usize) -> bool {
        let r = &self.net.receivers()[receiver];
        self.received_map(f, r).solve_right(&self.demand_target(r)).is_some()
    }

    pub fn solvable_all(&self) -> bool {
        let f = self.vector_global_kernels();
        (0..self.net.receivers().len()).all(|t| self.solvable_receiver(&f, t))
    }

    /// Per-receiver rank test: the demanded block rows of the received map
    /// must have full row rank omega_t * L'. For multicast demands this is
    /// exactly solvability; decoders then exist via linear solving.
    pub fn solvable_rank_check(&self) -> Vec<bool> {
        let f = self.vector_global_kernels();
        self.net
            .receivers()
            .iter()
            .map(|r| {
                let a = self.received_map(&f, r);
                let mut offsets = Vec::with_capacity(self.net.sources().len());
                let mut acc = 0;
                for &s in self.net.sources() {
                    offsets.push(acc);
                    acc += self.net.out_edges(s).len();
                }
                let mut rows = Vec::new();
                for &p in &r.demands {
                    let width = self.net.out_edges(self.net.sources()[p]).len();
                    for unit in offsets[p]..offsets[p] + width {
                        rows.extend(unit * self.lprime..(unit + 1) * self.lprime);
                    }
                }
                let need = rows.len();
                a.select_rows(&rows).rank_at_least(need)
            })
            .collect()
    }

    /// Synthesizes a dense decoder for the receiver by linear solving.
    pub fn solve_decoder(&self, f: &[BitMatrix], receiver: usize) -> Option<Decoder> {
        let r = &self.net.receivers()[receiver];
        self.received_map(f, r)
            .solve_right(&self.demand_target(r))
            .map(Decoder::Dense)
    }
}

/// Lifts a scalar solution into an (L-1, L)-fractional code: every scalar
/// kernel becomes the circulant with the same coefficients, sources use the
/// default padding generator, and each receiver gets the staged circulant
/// decoder derived from its scalar decoding matrix.
pub fn lift_code(code: &ScalarCode) -> Result<FractionalCode, LiftError> {
    let l = code.ctx().l();
    let mut lifted = FractionalCode::new(code.network().clone(), l, l - 1)?;
    for (d, e, g) in code.kernels() {
        lifted.set_kernel(d, e, Kernel::Circulant(Circulant::from_weight_bounded(g)))?;
    }
    for t in 0..code.network().receivers().len() {
        let dm = code.decoding_matrix(t)?;
        lifted.set_decoder(t, Decoder::staged_from_poly(&dm))?;
    }
    debug_assert_eq!(lifted.verify_all(), Ok(true));
    Ok(lifted)
}
