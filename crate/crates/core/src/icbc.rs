//! N-way interleaved CBC-MAC.
//!
//! Payload block `j` goes to lane `j mod N`; each lane runs an
//! independent CBC chain and the lane tags are XOR-merged before the
//! 8-byte truncation. The B0/AAD prefix stays a single sequential chain
//! shared by all lanes, so the critical path drops from `3 + m` cipher
//! calls to `3 + ceil(m / N)` while the total work stays `3 + m`.
//!
//! Lane start states are derived from the prefix (lane `k` XORs `k` into
//! the prefix's final byte), so nothing extra travels on the wire and
//! N = 1 reduces byte-for-byte to the sequential CBC-MAC. With no payload
//! blocks at all the plain prefix truncation is returned for every N,
//! which keeps the degenerate case engine-independent.
//!
//! Interleaved tags (N ≥ 2) are nonstandard: no deployed CCMP peer
//! computes them, and no forgery-resistance claim is made for the merge.

use crate::aes::{Block, Cipher, BLOCK_LEN};
use crate::ccmp::{payload_block, MicTag, MIC_LEN};
use thiserror::Error;

/// Upper bound on the lane count.
pub const MAX_LANES: usize = 16;

/// Minimum payload block count before lanes are dispatched onto pool
/// workers; below it the dispatch overhead would swamp the work and
/// lanes run serially on the caller's thread. Worker wake-up latency
/// reaches a millisecond on virtualized hosts, so the bar is high: a
/// lane has to carry at least a few milliseconds of cipher work.
pub const SPAWN_THRESHOLD_BLOCKS: usize = 32 * 1024;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum IcbcError {
    #[error("lane count {0} outside 1..={MAX_LANES}")]
    LanesOutOfRange(usize),
    #[error("worker count {workers} outside 1..=lanes ({lanes})")]
    WorkersOutOfRange { workers: usize, lanes: usize },
    #[error("cannot merge an empty tag sequence")]
    NoTags,
}

/// Lane and worker counts for the interleaved engine. Construction
/// validates the ranges, so a held config is always usable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IcbcConfig {
    lanes: usize,
    workers: usize,
}

impl IcbcConfig {
    /// `lanes` in 1..=16, `workers` in 1..=lanes.
    pub fn new(lanes: usize, workers: usize) -> Result<Self, IcbcError> {
        if lanes == 0 || lanes > MAX_LANES {
            return Err(IcbcError::LanesOutOfRange(lanes));
        }
        if workers == 0 || workers > lanes {
            return Err(IcbcError::WorkersOutOfRange { workers, lanes });
        }
        Ok(IcbcConfig { lanes, workers })
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    pub fn workers(&self) -> usize {
        self.workers
    }
}

/// One CBC lane: its index and current chaining value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaneState {
    pub index: usize,
    pub chain: Block,
}

/// The shared three-call prefix over B0 and the AAD blocks — the first
/// three links of the sequential CBC-MAC, identical for every lane count.
pub fn prefix_chain<C: Cipher>(cipher: &C, b0: Block, aad1: Block, aad2: Block) -> Block {
    let chain = cipher.encrypt(b0);
    let chain = cipher.encrypt(chain.xor(aad1));
    cipher.encrypt(chain.xor(aad2))
}

/// Derives the `n` lane start states from the prefix: lane `k` is the
/// prefix with its final byte XORed with `k`. Lane 0 equals the prefix,
/// and all states are pairwise distinct.
pub fn derive_lane_states(prefix: Block, n: usize) -> Result<Vec<LaneState>, IcbcError> {
    if n == 0 || n > MAX_LANES {
        return Err(IcbcError::LanesOutOfRange(n));
    }
    Ok((0..n)
        .map(|k| {
            let mut chain = prefix;
            chain.0[BLOCK_LEN - 1] ^= k as u8;
            LaneState { index: k, chain }
        })
        .collect())
}

/// Bytewise XOR fold of all lane tags.
pub fn merge_tags(tags: &[Block]) -> Result<Block, IcbcError> {
    if tags.is_empty() {
        return Err(IcbcError::NoTags);
    }
    Ok(tags.iter().fold(Block::ZERO, |acc, t| acc.xor(*t)))
}

/// Length of the longest sequential cipher-call chain for `m` payload
/// blocks on `n` lanes: the 3-call prefix plus the longest lane,
/// `ceil(m / n)`. With no payload blocks only the prefix remains.
pub fn critical_path_cipher_calls(m: u64, n: usize) -> Result<u64, IcbcError> {
    if n == 0 || n > MAX_LANES {
        return Err(IcbcError::LanesOutOfRange(n));
    }
    Ok(3 + m.div_ceil(n as u64))
}

/// Runs lane `k`'s CBC chain over its round-robin share of the payload.
/// A lane that received no blocks contributes the all-zero block, the
/// XOR identity, so it cannot leak the raw prefix into the merge.
fn lane_tag<C: Cipher>(cipher: &C, start: Block, payload: &[u8], lane: usize, n: usize) -> Block {
    let m = payload.len().div_ceil(BLOCK_LEN);
    if lane >= m {
        return Block::ZERO;
    }
    let mut chain = start;
    let mut j = lane;
    while j < m {
        chain = cipher.encrypt(chain.xor(payload_block(payload, j)));
        j += n;
    }
    chain
}

/// N-way interleaved CBC-MAC over one frame's MIC input.
///
/// The result depends only on the inputs and the lane count — worker
/// count and scheduling never change it. Lanes run on up to `workers`
/// pooled executors once the payload reaches [`SPAWN_THRESHOLD_BLOCKS`]
/// blocks, serially on the caller's thread otherwise.
pub fn interleaved_cbc_mac<C: Cipher + Sync>(
    cipher: &C,
    b0: Block,
    aad1: Block,
    aad2: Block,
    payload: &[u8],
    config: &IcbcConfig,
) -> MicTag {
    let prefix = prefix_chain(cipher, b0, aad1, aad2);
    let m = payload.len().div_ceil(BLOCK_LEN);
    if m == 0 {
        return MicTag(prefix.0[..MIC_LEN].try_into().unwrap());
    }

    let n = config.lanes;
    let states = derive_lane_states(prefix, n).expect("config lanes validated");

    let workers = config.workers.min(n);
    let tags: Vec<Block> = if n > 1 && workers > 1 && m >= SPAWN_THRESHOLD_BLOCKS {
        // Contiguous runs of lanes per worker; each task owns its slice
        // of the tag vector, so the merge input is fixed before any
        // scheduling happens. The caller queues the other chunks on the
        // pool and computes the first chunk itself.
        let mut tags = vec![Block::ZERO; n];
        let states = &states;
        let lanes_per_worker = n.div_ceil(workers);
        rayon::in_place_scope(|scope| {
            let mut chunks = tags.chunks_mut(lanes_per_worker).enumerate();
            let own = chunks.next();
            for (w, tag_chunk) in chunks {
                scope.spawn(move |_| {
                    for (offset, slot) in tag_chunk.iter_mut().enumerate() {
                        let k = w * lanes_per_worker + offset;
                        *slot = lane_tag(cipher, states[k].chain, payload, k, n);
                    }
                });
            }
            if let Some((_, tag_chunk)) = own {
                for (k, slot) in tag_chunk.iter_mut().enumerate() {
                    *slot = lane_tag(cipher, states[k].chain, payload, k, n);
                }
            }
        });
        tags
    } else {
        states
            .iter()
            .map(|state| lane_tag(cipher, state.chain, payload, state.index, n))
            .collect()
    };

    let merged = merge_tags(&tags).expect("at least one lane");
    MicTag(merged.0[..MIC_LEN].try_into().unwrap())
}
