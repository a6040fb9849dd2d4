//! Linear network coding over GF(2) with circular-shift (circulant) local
//! encoding kernels.
//!
//! The crate builds scalar linear solutions over GF(2^{L-1}) for admissible
//! block lengths L (primes with primitive root 2), lifts them to
//! (L-1, L)-fractional circular-shift codes of bounded degree, verifies and
//! simulates the resulting codes bit-exactly, and estimates the success
//! probability of random circular-shift and permutation-based codes.

pub mod bits;
pub mod circulant;
pub mod field;
pub(crate) mod fieldmat;
pub mod lift;
pub mod network;
pub mod random;
pub mod scalar;
pub mod simulate;
pub mod textio;

pub use bits::{BitMatrix, BitVector};
pub use circulant::Circulant;
pub use field::{FieldCtx, FieldElement, Poly2, WeightBoundedPoly};
pub use lift::{itilde, lift_code, Decoder, FractionalCode, Kernel};
pub use network::{EdgeId, Network, NodeId};
pub use scalar::{PolyMatrix, ScalarCode};
pub use simulate::{OpReport, ScalarTranscript, Transcript};
pub use random::{Scheme, TrialConfig, TrialResult};
