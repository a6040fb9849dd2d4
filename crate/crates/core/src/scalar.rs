//! Scalar linear codes over GF(2^{L-1}) on a network: kernels stored as
//! weight-bounded coefficient vectors (evaluated at the root of unity for
//! arithmetic), global-kernel recursion, solution verification, decoding
//! matrices in canonical low-weight form, and a flow-path greedy multicast
//! construction drawing kernels from a weight-restricted candidate alphabet.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::{canonical_weight_rep, FieldCtx, FieldElement, WeightBoundedPoly};
use crate::fieldmat::FieldMat;
use crate::network::{k_subsets, EdgeId, Network, NetworkError, Receiver};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("kernel degree {delta} is outside 1..={max}")]
    InvalidDegree { delta: usize, max: usize },
    #[error("{candidates} candidate kernels cannot distinguish {receivers} receivers")]
    TooFewCandidates { candidates: u128, receivers: usize },
    #[error("edges {0:?} and {1:?} are not an adjacent pair")]
    NotAdjacent(EdgeId, EdgeId),
    #[error("receiver '{0}' cannot recover its demanded units")]
    NotASolution(String),
    #[error("no kernel assignment keeps every receiver frontier invertible at edge {0:?}")]
    Stuck(EdgeId),
}

/// Matrix of weight-bounded binary coefficient vectors; the canonical form
/// in which decoding matrices are stored so that substituting the cyclic
/// shift matrix for the indeterminate is literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    l: usize,
    entries: Vec<WeightBoundedPoly>,
}

impl PolyMatrix {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        l: usize,
        mut f: impl FnMut(usize, usize) -> WeightBoundedPoly,
    ) -> Self {
        let entries: Vec<WeightBoundedPoly> = (0..rows * cols)
            .map(|i| {
                let e = f(i / cols, i % cols);
                assert_eq!(e.l(), l, "entry length mismatch");
                e
            })
            .collect();
        PolyMatrix { rows, cols, l, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn get(&self, r: usize, c: usize) -> &WeightBoundedPoly {
        assert!(r < self.rows && c < self.cols);
        &self.entries[r * self.cols + c]
    }

    /// Largest entry weight; the degree of the lifted circulant blocks.
    pub fn max_weight(&self) -> usize {
        self.entries.iter().map(|e| e.weight()).max().unwrap_or(0)
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub(crate) fn eval(&self, ctx: &FieldCtx, power: i64) -> FieldMat {
        FieldMat::from_fn(self.rows, self.cols, |r, c| self.get(r, c).eval(ctx, power))
    }
}

/// A scalar linear code: one field-valued local kernel per adjacent edge
/// pair, absent pairs meaning zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarCode {
    ctx: FieldCtx,
    net: Network,
    kernels: BTreeMap<(EdgeId, EdgeId), WeightBoundedPoly>,
}

impl ScalarCode {
    pub fn new(net: Network, ctx: FieldCtx) -> Self {
        ScalarCode { ctx, net, kernels: BTreeMap::new() }
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Assigns the local kernel for the adjacent pair (d, e); a zero kernel
    /// clears the pair.
    pub fn set_kernel(
        &mut self,
        d: EdgeId,
        e: EdgeId,
        g: WeightBoundedPoly,
    ) -> Result<(), ScalarError> {
        if self.net.head(d) != self.net.tail(e) {
            return Err(ScalarError::NotAdjacent(d, e));
        }
        assert_eq!(g.l(), self.ctx.l(), "kernel length mismatch");
        if g.is_zero() {
            self.kernels.remove(&(d, e));
        } else {
            self.kernels.insert((d, e), g);
        }
        Ok(())
    }

    pub fn kernel(&self, d: EdgeId, e: EdgeId) -> WeightBoundedPoly {
        self.kernels
            .get(&(d, e))
            .cloned()
            .unwrap_or_else(|| WeightBoundedPoly::zero(self.ctx.l()))
    }

    /// Nonzero kernels in deterministic (d, e) order.
    pub fn kernels(&self) -> impl Iterator<Item = (EdgeId, EdgeId, &WeightBoundedPoly)> {
        self.kernels.iter().map(|(&(d, e), g)| (d, e, g))
    }

    /// Largest kernel weight.
    pub fn degree(&self) -> usize {
        self.kernels.values().map(|g| g.weight()).max().unwrap_or(0)
    }

    /// Global kernels as an omega x |E| matrix over the field, with kernels
    /// evaluated at the `power`-th power of the root of unity. Columns for
    /// source out-edges are unit vectors; every other column is the
    /// kernel-weighted sum of its tail's incoming columns.
    pub(crate) fn global_matrix_at(&self, power: i64) -> FieldMat {
        let omega = self.net.omega();
        let mut gk = FieldMat::zero(omega, self.net.edge_count());
        for (i, e) in self.net.source_out_edges().into_iter().enumerate() {
            debug_assert_eq!(e.index(), i, "canonical order leads with source edges");
            *gk.get_mut(i, e.index()) = FieldElement::one();
        }
        for e in self.net.edge_ids() {
            if self.net.is_source_edge(e) {
                continue;
            }
            for &d in self.net.in_edges(self.net.tail(e)) {
                let g = match self.kernels.get(&(d, e)) {
                    Some(g) => g.eval(&self.ctx, power),
                    None => continue,
                };
                for i in 0..omega {
                    let term = self.ctx.mul(gk.get(i, d.index()), &g);
                    *gk.get_mut(i, e.index()) = self.ctx.add(gk.get(i, e.index()), &term);
                }
            }
        }
        gk
    }

    /// The global kernel of one edge (kernels evaluated at the root itself).
    pub fn global_kernel(&self, e: EdgeId) -> Vec<FieldElement> {
        let gk = self.global_matrix_at(1);
        (0..gk.rows()).map(|i| gk.get(i, e.index()).clone()).collect()
    }

    /// Columns of the global matrix for a receiver's in-edges.
    fn receiver_matrix(&self, gk: &FieldMat, r: &Receiver) -> FieldMat {
        let in_edges = self.net.in_edges(r.node);
        FieldMat::from_fn(gk.rows(), in_edges.len(), |i, j| {
            gk.get(i, in_edges[j].index()).clone()
        })
    }

    /// Unit columns selecting the demanded source units.
    fn demand_target(&self, r: &Receiver) -> FieldMat {
        let offsets = self.unit_offsets();
        let mut cols = Vec::new();
        for &p in &r.demands {
            let width = self.net.out_edges(self.net.sources()[p]).len();
            cols.extend(offsets[p]..offsets[p] + width);
        }
        let mut t = FieldMat::zero(self.net.omega(), cols.len());
        for (j, i) in cols.into_iter().enumerate() {
            *t.get_mut(i, j) = FieldElement::one();
        }
        t
    }

    /// Start of each source's unit block among all source units.
    fn unit_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.net.sources().len());
        let mut acc = 0;
        for &s in self.net.sources() {
            offsets.push(acc);
            acc += self.net.out_edges(s).len();
        }
        offsets
    }

    /// True iff every receiver can recover its demanded units: the demanded
    /// unit columns lie in the column span of the receiver's global kernels.
    pub fn is_solution(&self) -> bool {
        self.is_solution_at(1)
    }

    /// Solution check with all kernels evaluated at the `power`-th power of
    /// the root of unity.
    pub fn is_solution_at(&self, power: i64) -> bool {
        let gk = self.global_matrix_at(power);
        self.net.receivers().iter().all(|r| {
            let a = self.receiver_matrix(&gk, r);
            a.solve_right(&self.ctx, &self.demand_target(r)).is_some()
        })
    }

    /// The deterministic decoding matrix for receiver `t_index`
    /// (|In(t)| x omega_t, entries in canonical low-weight form): the
    /// free-variables-zero solution of
    /// [global kernels]_{In(t)} * D = demanded unit columns.
    pub fn decoding_matrix(&self, t_index: usize) -> Result<PolyMatrix, ScalarError> {
        let r = &self.net.receivers()[t_index];
        let gk = self.global_matrix_at(1);
        let a = self.receiver_matrix(&gk, r);
        let d = a
            .solve_right(&self.ctx, &self.demand_target(r))
            .ok_or_else(|| ScalarError::NotASolution(self.net.node_name(r.node).into()))?;
        Ok(PolyMatrix::from_fn(d.rows(), d.cols(), self.ctx.l(), |i, j| {
            canonical_weight_rep(&self.ctx, d.get(i, j))
        }))
    }
}

/// Number of length-`l` binary vectors of weight at most `delta`.
pub fn candidate_count(l: usize, delta: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for i in 0..=delta.min(l) {
        if i > 0 {
            binom = binom * (l - i + 1) as u128 / i as u128;
        }
        total += binom;
    }
    total
}

/// All weight-at-most-`delta` kernels of length L, ordered by weight and
/// then by lexicographic index set; they evaluate to pairwise distinct field
/// elements whenever delta <= (L-1)/2.
pub fn candidate_set(ctx: &FieldCtx, delta: usize) -> Vec<WeightBoundedPoly> {
    let l = ctx.l();
    assert!(delta <= (l - 1) / 2, "candidates must stay weight-bounded");
    let mut out = Vec::new();
    for w in 0..=delta {
        for subset in k_subsets(l, w) {
            out.push(WeightBoundedPoly::from_indices(l, &subset));
        }
    }
    out
}

/// Greedy flow-path multicast construction: walks edges in topological
/// order, maintaining for every receiver an invertible omega-column frontier
/// along its edge-disjoint paths, and assigns the first candidate kernel
/// tuple (in candidate order) that keeps all affected frontiers invertible.
/// Succeeds whenever the candidate count is at least the receiver count.
pub fn lif_construct(
    net: &Network,
    ctx: &FieldCtx,
    delta: usize,
) -> Result<ScalarCode, ScalarError> {
    net.require_multicast()?;
    let l = ctx.l();
    let max = (l - 1) / 2;
    if delta == 0 || delta > max {
        return Err(ScalarError::InvalidDegree { delta, max });
    }
    let receivers = net.receivers();
    let candidates_available = candidate_count(l, delta);
    if candidates_available < receivers.len() as u128 {
        return Err(ScalarError::TooFewCandidates {
            candidates: candidates_available,
            receivers: receivers.len(),
        });
    }
    let omega = net.omega();
    let candidates = candidate_set(ctx, delta);

    // Which receivers route through each edge, along which path slot, and
    // coming from which predecessor edge.
    struct User {
        receiver: usize,
        slot: usize,
        pred: EdgeId,
    }
    let mut users: Vec<Vec<User>> = (0..net.edge_count()).map(|_| Vec::new()).collect();
    let mut frontiers: Vec<Vec<EdgeId>> = Vec::with_capacity(receivers.len());
    for (ri, r) in receivers.iter().enumerate() {
        frontiers.push(net.source_out_edges());
        for (slot, path) in net.edge_disjoint_paths(r.node)?.into_iter().enumerate() {
            for w in path.windows(2) {
                users[w[1].index()].push(User { receiver: ri, slot, pred: w[0] });
            }
        }
    }

    let mut gk = FieldMat::zero(omega, net.edge_count());
    for i in 0..omega {
        *gk.get_mut(i, i) = FieldElement::one();
    }
    let mut code = ScalarCode::new(net.clone(), ctx.clone());

    for e in net.edge_ids() {
        let us = &users[e.index()];
        if net.is_source_edge(e) || us.is_empty() {
            continue;
        }
        let mut preds: Vec<EdgeId> = us.iter().map(|u| u.pred).collect();
        preds.sort_unstable();
        preds.dedup();

        let mut idx = vec![0usize; preds.len()];
        let f = loop {
            let mut f = vec![FieldElement::zero(); omega];
            for (j, &d) in preds.iter().enumerate() {
                let c = candidates[idx[j]].eval(ctx, 1);
                for (i, fi) in f.iter_mut().enumerate() {
                    *fi = ctx.add(fi, &ctx.mul(&c, gk.get(i, d.index())));
                }
            }
            let keeps_all_invertible = us.iter().all(|u| {
                let frontier = &frontiers[u.receiver];
                let m = FieldMat::from_fn(omega, omega, |i, j| {
                    if frontier[j] == u.pred {
                        f[i].clone()
                    } else {
                        gk.get(i, frontier[j].index()).clone()
                    }
                });
                m.rank(ctx) == omega
            });
            if keeps_all_invertible {
                break f;
            }
            if !advance_odometer(&mut idx, candidates.len()) {
                // Unreachable when the candidate-count precondition holds;
                // kept as an honest failure path.
                return Err(ScalarError::Stuck(e));
            }
        };

        for (j, &d) in preds.iter().enumerate() {
            if !candidates[idx[j]].is_zero() {
                code.set_kernel(d, e, candidates[idx[j]].clone())?;
            }
        }
        for (i, fi) in f.into_iter().enumerate() {
            *gk.get_mut(i, e.index()) = fi;
        }
        for u in us {
            frontiers[u.receiver][u.slot] = e;
        }
    }

    debug_assert!(code.is_solution());
    Ok(code)
}

/// Advances a mixed-radix counter (last digit fastest); false on wrap-around.
fn advance_odometer(idx: &mut [usize], radix: usize) -> bool {
    for digit in idx.iter_mut().rev() {
        *digit += 1;
        if *digit < radix {
            return true;
        }
        *digit = 0;
    }
    false
}
