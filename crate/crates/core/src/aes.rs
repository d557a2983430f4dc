//! The AES-128 forward block cipher.
//!
//! Key expansion plus the four round operations, composed into the
//! 10-round encryption and also exported individually so each step can
//! be tested on its own. Only the forward cipher exists here: CCM uses
//! it for both directions, so the inverse cipher is never needed.
//!
//! The state is a flat 16-byte array in the usual column-major layout:
//! byte `i` is state row `i % 4`, column `i / 4`. Not constant-time (see
//! the crate docs).

use std::fmt;

/// Cipher block length in bytes.
pub const BLOCK_LEN: usize = 16;

/// Number of round keys for AES-128 (initial key plus 10 rounds).
pub const ROUND_KEYS: usize = 11;

/// A 16-byte cipher block / AES state.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block(pub [u8; BLOCK_LEN]);

impl Block {
    /// The all-zero block, the identity element of XOR.
    pub const ZERO: Block = Block([0; BLOCK_LEN]);

    /// Bytewise XOR against another block.
    #[inline]
    pub fn xor(self, other: Block) -> Block {
        let mut out = self.0;
        for (o, b) in out.iter_mut().zip(other.0.iter()) {
            *o ^= b;
        }
        Block(out)
    }

    pub fn as_bytes(&self) -> &[u8; BLOCK_LEN] {
        &self.0
    }
}

impl From<[u8; BLOCK_LEN]> for Block {
    fn from(bytes: [u8; BLOCK_LEN]) -> Self {
        Block(bytes)
    }
}

impl std::ops::BitXor for Block {
    type Output = Block;

    fn bitxor(self, rhs: Block) -> Block {
        self.xor(rhs)
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Block(")?;
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

/// A 128-bit cipher key.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Key128(pub [u8; 16]);

impl fmt::Debug for Key128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Keys stay out of logs; only tests ever want the bytes.
        write!(f, "Key128(..)")
    }
}

/// The 11 round keys expanded from a 128-bit key.
///
/// Immutable after creation; safe to share across threads.
#[derive(Clone, PartialEq, Eq)]
pub struct RoundKeySchedule {
    round_keys: [Block; ROUND_KEYS],
}

impl RoundKeySchedule {
    /// Round keys 0..=10. Entry 0 is the cipher key verbatim.
    pub fn round_keys(&self) -> &[Block; ROUND_KEYS] {
        &self.round_keys
    }
}

impl fmt::Debug for RoundKeySchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RoundKeySchedule(..)")
    }
}

/// A 128-bit block encryptor.
///
/// Implemented by [`RoundKeySchedule`] and by instrumentation wrappers
/// such as [`crate::bench::CountingCipher`]. Implementations must be
/// pure: the same input block always maps to the same output block.
pub trait Cipher {
    fn encrypt(&self, block: Block) -> Block;
}

impl Cipher for RoundKeySchedule {
    fn encrypt(&self, block: Block) -> Block {
        encrypt_block(self, block)
    }
}

/// The AES S-box. `generate_sbox` rebuilds this table from the
/// inverse-plus-affine definition; `verify_sbox_table` compares the two.
const SBOX: [u8; 256] = [
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
];

const RCON: [u8; 10] = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36];

/// Multiply by x in GF(2^8), reducing by x^8 + x^4 + x^3 + x + 1.
#[inline]
fn xtime(a: u8) -> u8 {
    let shifted = a << 1;
    if a & 0x80 != 0 {
        shifted ^ 0x1b
    } else {
        shifted
    }
}

/// GF(2^8) multiplication composed from `xtime`.
fn gf_mul(mut a: u8, mut b: u8) -> u8 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        a = xtime(a);
        b >>= 1;
    }
    acc
}

/// Multiplicative inverse in GF(2^8), with 0 mapped to 0.
fn gf_inv(x: u8) -> u8 {
    if x == 0 {
        return 0;
    }
    // 254 squarings-and-multiplies would do; a linear scan is plainer.
    (1..=255u8)
        .find(|&y| gf_mul(x, y) == 1)
        .expect("every nonzero element has an inverse")
}

/// Builds the S-box from its definition: multiplicative inverse in
/// GF(2^8) followed by the fixed affine transform.
pub fn generate_sbox() -> [u8; 256] {
    let mut table = [0u8; 256];
    for (x, entry) in table.iter_mut().enumerate() {
        let b = gf_inv(x as u8);
        let mut out = 0u8;
        for i in 0..8 {
            let bit = (b >> i)
                ^ (b >> ((i + 4) % 8))
                ^ (b >> ((i + 5) % 8))
                ^ (b >> ((i + 6) % 8))
                ^ (b >> ((i + 7) % 8))
                ^ (0x63 >> i);
            out |= (bit & 1) << i;
        }
        *entry = out;
    }
    table
}

/// A disagreement between the baked-in S-box table and the one generated
/// from the definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SboxMismatch {
    pub index: u8,
    pub stored: u8,
    pub generated: u8,
}

impl fmt::Display for SboxMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "S-box[{:#04x}]: stored {:#04x}, generated {:#04x}",
            self.index, self.stored, self.generated
        )
    }
}

/// Regenerates the S-box from its definition and compares it against the
/// baked-in table, reporting the first mismatch.
pub fn verify_sbox_table() -> Result<(), SboxMismatch> {
    let generated = generate_sbox();
    for (i, (&stored, &gen)) in SBOX.iter().zip(generated.iter()).enumerate() {
        if stored != gen {
            return Err(SboxMismatch {
                index: i as u8,
                stored,
                generated: gen,
            });
        }
    }
    Ok(())
}

/// Replaces each state byte through the S-box.
pub fn sub_bytes(state: Block) -> Block {
    let mut out = state.0;
    for b in out.iter_mut() {
        *b = SBOX[*b as usize];
    }
    Block(out)
}

/// Rotates state rows 1, 2, 3 left by 1, 2, 3 cells; row 0 is unchanged.
pub fn shift_rows(state: Block) -> Block {
    let s = &state.0;
    let mut out = [0u8; BLOCK_LEN];
    for col in 0..4 {
        for row in 0..4 {
            out[4 * col + row] = s[4 * ((col + row) % 4) + row];
        }
    }
    Block(out)
}

/// Multiplies each state column by the circulant {02,03,01,01} matrix
/// over GF(2^8).
pub fn mix_columns(state: Block) -> Block {
    let s = &state.0;
    let mut out = [0u8; BLOCK_LEN];
    for col in 0..4 {
        let c = &s[4 * col..4 * col + 4];
        for row in 0..4 {
            out[4 * col + row] = xtime(c[row])
                ^ xtime(c[(row + 1) % 4])
                ^ c[(row + 1) % 4]
                ^ c[(row + 2) % 4]
                ^ c[(row + 3) % 4];
        }
    }
    Block(out)
}

/// XORs a round key into the state.
pub fn add_round_key(state: Block, round_key: Block) -> Block {
    state.xor(round_key)
}

/// FIPS-197 key expansion for Nk = 4, Nr = 10: 44 four-byte words grouped
/// into 11 round keys. Round key 0 is the cipher key itself.
pub fn expand_key(key: &Key128) -> RoundKeySchedule {
    let mut words = [[0u8; 4]; 44];
    for (i, w) in words.iter_mut().take(4).enumerate() {
        w.copy_from_slice(&key.0[4 * i..4 * i + 4]);
    }
    for i in 4..44 {
        let mut t = words[i - 1];
        if i % 4 == 0 {
            t.rotate_left(1);
            for b in t.iter_mut() {
                *b = SBOX[*b as usize];
            }
            t[0] ^= RCON[i / 4 - 1];
        }
        for j in 0..4 {
            words[i][j] = words[i - 4][j] ^ t[j];
        }
    }

    let mut round_keys = [Block::ZERO; ROUND_KEYS];
    for (r, rk) in round_keys.iter_mut().enumerate() {
        let mut bytes = [0u8; BLOCK_LEN];
        for j in 0..4 {
            bytes[4 * j..4 * j + 4].copy_from_slice(&words[4 * r + j]);
        }
        *rk = Block(bytes);
    }
    RoundKeySchedule { round_keys }
}

/// Encrypts one block: initial round-key addition, nine full rounds, and
/// a final round without `mix_columns`.
pub fn encrypt_block(schedule: &RoundKeySchedule, plaintext: Block) -> Block {
    let rk = &schedule.round_keys;
    let mut state = add_round_key(plaintext, rk[0]);
    for key in rk.iter().take(10).skip(1) {
        state = add_round_key(mix_columns(shift_rows(sub_bytes(state))), *key);
    }
    add_round_key(shift_rows(sub_bytes(state)), rk[10])
}
