//! Random (L', L)-fractional code sampling — degree-1 circular-shift and
//! permutation kernel schemes — with a deterministic, order-independent
//! Monte-Carlo harness, Wilson interval reporting, and the closed-form
//! success-probability bounds the estimates are checked against.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::bits::BitMatrix;
use crate::circulant::{random_degree1, Circulant};
use crate::lift::{FractionalCode, Kernel};
use crate::network::Network;

/// Kernel sampling scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Uniform over the L+1 degree-at-most-1 circulants {0, I, C, ..., C^{L-1}}.
    CircularShiftDeg1,
    /// Zero with probability 1/(L+1), otherwise a uniform random permutation
    /// matrix; the zero mass matches the circular-shift scheme so the two
    /// success columns are comparable.
    Permutation,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::CircularShiftDeg1 => "cshift",
            Scheme::Permutation => "perm",
        }
    }
}

/// One Monte-Carlo experiment: draw `trials` random codes on `net` and count
/// how many satisfy every receiver's rank condition.
#[derive(Clone, Debug)]
pub struct TrialConfig {
    pub net: Network,
    pub l: usize,
    pub lprime: usize,
    pub scheme: Scheme,
    pub trials: u64,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialResult {
    pub trials: u64,
    pub successes: u64,
    /// Per receiver (by index), in how many trials that receiver's rank
    /// condition failed; one trial can fail at several receivers.
    pub receiver_failures: Vec<u64>,
}

impl TrialResult {
    pub fn estimate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// 95% Wilson score interval for the success probability.
    pub fn wilson95(&self) -> (f64, f64) {
        wilson95(self.successes, self.trials)
    }
}

pub fn wilson95(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials >= 1 && successes <= trials);
    let z = 1.959963984540054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = p + z * z / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
    // At the boundary counts the interval endpoint is exactly 0 or 1 in real
    // arithmetic; clamp so rounding cannot exclude the point estimate.
    let lo = if successes == 0 { 0.0 } else { ((center - half) / denom).max(0.0) };
    let hi = if successes == trials { 1.0 } else { ((center + half) / denom).min(1.0) };
    (lo, hi)
}

/// The per-trial random stream: the master seed keys the cipher and the
/// trial index selects the counter stream, so trials are independent and
/// order-free by construction.
fn trial_rng(master_seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Draws one random code: every adjacent edge pair gets a kernel sampled
/// per the scheme (in canonical edge order), then every source generator is
/// drawn uniformly over all binary matrices of its shape. No decoders are
/// attached.
pub fn random_code(cfg: &TrialConfig, trial: u64) -> FractionalCode {
    let mut rng = trial_rng(cfg.master_seed, trial);
    let net = &cfg.net;
    let mut code = FractionalCode::new(net.clone(), cfg.l, cfg.lprime)
        .expect("trial config has valid unit sizes");
    for e in net.edge_ids() {
        if net.is_source_edge(e) {
            continue;
        }
        for &d in net.in_edges(net.tail(e)) {
            let kernel = match cfg.scheme {
                Scheme::CircularShiftDeg1 => Kernel::Circulant(random_degree1(&mut rng, cfg.l)),
                Scheme::Permutation => {
                    if rng.gen_range(0..=cfg.l) == 0 {
                        Kernel::Circulant(Circulant::zero(cfg.l))
                    } else {
                        let mut p: Vec<usize> = (0..cfg.l).collect();
                        p.shuffle(&mut rng);
                        Kernel::Permutation(p)
                    }
                }
            };
            code.set_kernel(d, e, kernel).expect("adjacent pair");
        }
    }
    for s in 0..net.sources().len() {
        let units = net.out_edges(net.sources()[s]).len();
        let g = BitMatrix::random(&mut rng, units * cfg.lprime, units * cfg.l);
        code.set_generator(s, g).expect("generator shape");
    }
    code
}

/// Whether every receiver of the code meets the decodability rank condition.
pub fn trial_success(code: &FractionalCode) -> bool {
    code.solvable_rank_check().into_iter().all(|ok| ok)
}

/// Runs the experiment. Deterministic for a fixed master seed under any
/// parallel schedule: per-trial streams are index-keyed and the aggregation
/// is commutative counting.
pub fn monte_carlo(cfg: &TrialConfig) -> TrialResult {
    assert!(cfg.trials >= 1);
    let receivers = cfg.net.receivers().len();
    let zero = || (0u64, vec![0u64; receivers]);
    let (successes, receiver_failures) = (0..cfg.trials)
        .into_par_iter()
        .fold(zero, |(mut ok, mut fails), trial| {
            let code = random_code(cfg, trial);
            let per_receiver = code.solvable_rank_check();
            if per_receiver.iter().all(|&r| r) {
                ok += 1;
            }
            for (f, &r) in fails.iter_mut().zip(&per_receiver) {
                *f += u64::from(!r);
            }
            (ok, fails)
        })
        .reduce(zero, |(a, av), (b, bv)| {
            (a + b, av.into_iter().zip(bv).map(|(x, y)| x + y).collect())
        });
    TrialResult { trials: cfg.trials, successes, receiver_failures }
}

/// Closed-form lower bound on the success probability of the degree-1
/// circular-shift scheme: 1 - (L+1)|T||E| 2^{-L eps}, achieved at the unit
/// ratio L'/L = (omega - |E| eps)/omega.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityBound {
    pub bound: f64,
    /// floor((omega - |E| eps) L / omega); may be nonpositive, see `vacuous`.
    pub lprime: i64,
    /// True when the statement constrains nothing: bound at or below zero,
    /// or no positive unit size satisfies the ratio.
    pub vacuous: bool,
}

pub fn success_lower_bound(net: &Network, l: usize, eps: f64) -> ProbabilityBound {
    assert!(eps > 0.0);
    let omega = net.omega() as f64;
    let edges = net.edge_count() as f64;
    let receivers = net.receivers().len() as f64;
    let lprime = ((omega - edges * eps) * l as f64 / omega).floor() as i64;
    let exponent = -(l as f64) * eps + (l as f64 + 1.0).log2() + (receivers * edges).log2();
    let bound = 1.0 - exponent.exp2();
    ProbabilityBound { bound, lprime, vacuous: bound <= 0.0 || lprime <= 0 }
}

/// Empirical check of the rank-deficiency tail bound: sampling a uniform
/// dense matrix plus a uniform degree-at-most-1 circulant, the frequency of
/// rank < L(1-eps) must stay below (L+1) 2^{-L eps} (up to sampling noise).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailCheck {
    pub samples: u64,
    pub hits: u64,
    pub empirical: f64,
    pub bound: f64,
}

pub fn deficiency_tail_check(l: usize, eps: f64, samples: u64, seed: u64) -> TailCheck {
    assert!(samples >= 1);
    let threshold = l as f64 * (1.0 - eps);
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let dense = BitMatrix::random(&mut rng, l, l);
            let shift = random_degree1(&mut rng, l);
            let rank = dense.add(&shift.to_dense()).rank();
            u64::from((rank as f64) < threshold)
        })
        .sum();
    TailCheck {
        samples,
        hits,
        empirical: hits as f64 / samples as f64,
        bound: (l as f64 + 1.0) * (-(l as f64) * eps).exp2(),
    }
}
