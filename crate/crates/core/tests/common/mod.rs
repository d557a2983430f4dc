//! Test-only reference implementations, kept independent of the crate's
//! cipher pipeline: an AES-128 written from the FIPS-197 definition on a
//! row-major 4x4 state, and straight-line CBC-MAC / interleaved-lane
//! chains. These are the oracles the implementation is checked against.

#![allow(dead_code)]

use ccmp_icbc::aes::Cipher;

/// GF(2^8) multiplication by long multiplication into a 16-bit product
/// followed by explicit reduction with x^8 + x^4 + x^3 + x + 1 (0x11b).
/// Deliberately a different route than the implementation's xtime chain.
pub fn ref_gf_mul(a: u8, b: u8) -> u8 {
    let mut product: u16 = 0;
    for bit in 0..8 {
        if b & (1 << bit) != 0 {
            product ^= (a as u16) << bit;
        }
    }
    for bit in (8..16).rev() {
        if product & (1 << bit) != 0 {
            product ^= 0x11b << (bit - 8);
        }
    }
    product as u8
}

fn ref_gf_inv(x: u8) -> u8 {
    if x == 0 {
        return 0;
    }
    (1..=255u8).find(|&y| ref_gf_mul(x, y) == 1).unwrap()
}

/// S-box from the definition, using the rotate form of the affine map:
/// s = b ^ rotl1(b) ^ rotl2(b) ^ rotl3(b) ^ rotl4(b) ^ 0x63.
/// Computed once; the inverse search is slow.
pub fn ref_sbox() -> [u8; 256] {
    static TABLE: std::sync::OnceLock<[u8; 256]> = std::sync::OnceLock::new();
    *TABLE.get_or_init(|| {
        let mut table = [0u8; 256];
        for (x, entry) in table.iter_mut().enumerate() {
            let b = ref_gf_inv(x as u8);
            *entry = b
                ^ b.rotate_left(1)
                ^ b.rotate_left(2)
                ^ b.rotate_left(3)
                ^ b.rotate_left(4)
                ^ 0x63;
        }
        table
    })
}

/// Reference AES-128 on a row-major 4x4 state matrix.
pub struct RefAes {
    sbox: [u8; 256],
    round_keys: [[u8; 16]; 11],
}

impl RefAes {
    pub fn new(key: [u8; 16]) -> Self {
        let sbox = ref_sbox();
        let rcon = [0x01u8, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36];

        let mut words = [[0u8; 4]; 44];
        for i in 0..4 {
            words[i].copy_from_slice(&key[4 * i..4 * i + 4]);
        }
        for i in 4..44 {
            let mut t = words[i - 1];
            if i % 4 == 0 {
                t = [
                    sbox[t[1] as usize] ^ rcon[i / 4 - 1],
                    sbox[t[2] as usize],
                    sbox[t[3] as usize],
                    sbox[t[0] as usize],
                ];
            }
            for j in 0..4 {
                words[i][j] = words[i - 4][j] ^ t[j];
            }
        }
        let mut round_keys = [[0u8; 16]; 11];
        for r in 0..11 {
            for j in 0..4 {
                round_keys[r][4 * j..4 * j + 4].copy_from_slice(&words[4 * r + j]);
            }
        }
        RefAes { sbox, round_keys }
    }

    pub fn round_key(&self, round: usize) -> [u8; 16] {
        self.round_keys[round]
    }

    fn to_matrix(bytes: &[u8; 16]) -> [[u8; 4]; 4] {
        let mut m = [[0u8; 4]; 4];
        for col in 0..4 {
            for row in 0..4 {
                m[row][col] = bytes[4 * col + row];
            }
        }
        m
    }

    fn from_matrix(m: &[[u8; 4]; 4]) -> [u8; 16] {
        let mut bytes = [0u8; 16];
        for col in 0..4 {
            for row in 0..4 {
                bytes[4 * col + row] = m[row][col];
            }
        }
        bytes
    }

    fn add_round_key(state: &mut [[u8; 4]; 4], rk: &[u8; 16]) {
        let k = Self::to_matrix(rk);
        for row in 0..4 {
            for col in 0..4 {
                state[row][col] ^= k[row][col];
            }
        }
    }

    pub fn encrypt(&self, plaintext: [u8; 16]) -> [u8; 16] {
        let mut state = Self::to_matrix(&plaintext);
        Self::add_round_key(&mut state, &self.round_keys[0]);

        for round in 1..=10 {
            for row in state.iter_mut() {
                for cell in row.iter_mut() {
                    *cell = self.sbox[*cell as usize];
                }
            }
            for (row, line) in state.iter_mut().enumerate() {
                line.rotate_left(row);
            }
            if round < 10 {
                let old = state;
                for col in 0..4 {
                    state[0][col] = ref_gf_mul(old[0][col], 2)
                        ^ ref_gf_mul(old[1][col], 3)
                        ^ old[2][col]
                        ^ old[3][col];
                    state[1][col] = old[0][col]
                        ^ ref_gf_mul(old[1][col], 2)
                        ^ ref_gf_mul(old[2][col], 3)
                        ^ old[3][col];
                    state[2][col] = old[0][col]
                        ^ old[1][col]
                        ^ ref_gf_mul(old[2][col], 2)
                        ^ ref_gf_mul(old[3][col], 3);
                    state[3][col] = ref_gf_mul(old[0][col], 3)
                        ^ old[1][col]
                        ^ old[2][col]
                        ^ ref_gf_mul(old[3][col], 2);
                }
            }
            Self::add_round_key(&mut state, &self.round_keys[round]);
        }
        Self::from_matrix(&state)
    }
}

pub fn xor16(a: [u8; 16], b: [u8; 16]) -> [u8; 16] {
    let mut out = a;
    for (o, x) in out.iter_mut().zip(b.iter()) {
        *o ^= x;
    }
    out
}

/// Payload block `index` with zero padding, as raw bytes.
pub fn ref_block(payload: &[u8], index: usize) -> [u8; 16] {
    let start = index * 16;
    let end = (start + 16).min(payload.len());
    let mut out = [0u8; 16];
    out[..end - start].copy_from_slice(&payload[start..end]);
    out
}

/// Straight-line CBC-MAC chain over B0, the AAD blocks, and the payload,
/// generic over the crate's cipher trait so call counting works.
pub fn ref_cbc_mac<C: Cipher>(
    cipher: &C,
    b0: [u8; 16],
    aad1: [u8; 16],
    aad2: [u8; 16],
    payload: &[u8],
) -> [u8; 8] {
    use ccmp_icbc::Block;
    let mut chain = cipher.encrypt(Block(b0)).0;
    chain = cipher.encrypt(Block(xor16(chain, aad1))).0;
    chain = cipher.encrypt(Block(xor16(chain, aad2))).0;
    let blocks = payload.len().div_ceil(16);
    for i in 0..blocks {
        chain = cipher.encrypt(Block(xor16(chain, ref_block(payload, i)))).0;
    }
    chain[..8].try_into().unwrap()
}

/// One interleaved lane run straight-line: chains blocks `lane`,
/// `lane + n`, ... from `start`. Returns the final chaining value and
/// how many blocks the lane consumed.
pub fn ref_lane_chain<C: Cipher>(
    cipher: &C,
    start: [u8; 16],
    payload: &[u8],
    lane: usize,
    n: usize,
) -> ([u8; 16], usize) {
    use ccmp_icbc::Block;
    let m = payload.len().div_ceil(16);
    let mut chain = start;
    let mut consumed = 0;
    let mut j = lane;
    while j < m {
        chain = cipher.encrypt(Block(xor16(chain, ref_block(payload, j)))).0;
        consumed += 1;
        j += n;
    }
    (chain, consumed)
}

/// Full straight-line n-lane interleaved MIC: shared prefix, per-lane
/// chains (empty lanes contribute zero), XOR merge, truncate to 8 bytes.
pub fn ref_interleaved<C: Cipher>(
    cipher: &C,
    b0: [u8; 16],
    aad1: [u8; 16],
    aad2: [u8; 16],
    payload: &[u8],
    n: usize,
) -> [u8; 8] {
    use ccmp_icbc::Block;
    let mut prefix = cipher.encrypt(Block(b0)).0;
    prefix = cipher.encrypt(Block(xor16(prefix, aad1))).0;
    prefix = cipher.encrypt(Block(xor16(prefix, aad2))).0;

    let m = payload.len().div_ceil(16);
    if m == 0 {
        return prefix[..8].try_into().unwrap();
    }

    let mut merged = [0u8; 16];
    for lane in 0..n {
        let mut start = prefix;
        start[15] ^= lane as u8;
        let (tag, consumed) = ref_lane_chain(cipher, start, payload, lane, n);
        if consumed > 0 {
            merged = xor16(merged, tag);
        }
    }
    merged[..8].try_into().unwrap()
}
