//! Deterministic pseudo-randomness.
//!
//! Everything random in a run flows from a single 64-bit seed through
//! [`Prng`], a SplitMix64 generator implemented here rather than taken from a
//! platform library, so that ports to other languages reproduce golden
//! outputs bit for bit. The algorithm is frozen: changing it invalidates
//! every golden file.
//!
//! Protocol randomness never consumes a shared stream. Each (round, node)
//! pair gets its own child generator via [`Prng::stream`], so the order in
//! which nodes are processed cannot change outcomes. Stream tag `a = 0` is
//! reserved for topology construction; protocol steps use `a = round`
//! (rounds with randomness start at 1).

use crate::error::{Error, Result};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer. Bijective on u64.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// SplitMix64: state advances by a fixed odd constant, outputs are the
/// mixed state. A zero seed is fine; the additive constant keeps the state
/// from sticking.
#[derive(Debug, Clone)]
pub struct Prng {
    state: u64,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng { state: seed }
    }

    /// Child generator keyed by `(a, b)` on top of `seed`. Used to split
    /// per-(round, node) streams off the run seed.
    pub fn stream(seed: u64, a: u64, b: u64) -> Self {
        let mut s = seed;
        s = mix64(s ^ a.wrapping_mul(GAMMA));
        s = mix64(s ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f));
        Prng::new(s)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform draw in `[0, bound)` by modulo reduction. The modulo bias is
    /// at most `bound / 2^64`, irrelevant at simulation scale; taking the
    /// remainder keeps the draw count at exactly one per call.
    #[inline]
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    /// True with probability 1/k. `k = u64::MAX` effectively disables the
    /// event. Consumes exactly one draw.
    #[inline]
    pub fn one_in(&mut self, k: u64) -> bool {
        debug_assert!(k > 0);
        self.next_u64().is_multiple_of(k)
    }

    /// Uniform sample of `m` distinct values from `[0, n)`, by partial
    /// Fisher-Yates. Consumes exactly `m` draws.
    pub fn choose_distinct(&mut self, n: u32, m: u32) -> Result<Vec<u32>> {
        if m > n {
            return Err(Error::invalid(format!(
                "choose_distinct: m ({m}) exceeds population size n ({n})"
            )));
        }
        let mut scratch: Vec<u32> = (0..n).collect();
        let mut out = Vec::with_capacity(m as usize);
        self.choose_distinct_into(&mut scratch, m, &mut out);
        Ok(out)
    }

    /// Same sampling as [`choose_distinct`](Self::choose_distinct), but over a
    /// caller-owned scratch permutation of the population, restored before
    /// returning. Lets hot loops sample repeatedly without reallocating.
    pub(crate) fn choose_distinct_into(
        &mut self,
        scratch: &mut [u32],
        m: u32,
        out: &mut Vec<u32>,
    ) {
        let n = scratch.len();
        debug_assert!(m as usize <= n);
        out.clear();
        let mut swaps: Vec<(usize, usize)> = Vec::with_capacity(m as usize);
        for i in 0..m as usize {
            let j = i + self.next_below((n - i) as u64) as usize;
            scratch.swap(i, j);
            swaps.push((i, j));
            out.push(scratch[i]);
        }
        // undo the swaps so the scratch stays a permutation-free population
        for &(i, j) in swaps.iter().rev() {
            scratch.swap(i, j);
        }
    }
}
