//! AES-128 CCMP frame protection with a pluggable MIC engine, plus a
//! benchmark harness for its encryption-time decomposition.
//!
//! The crate has four parts:
//!
//! * [`aes`] — the AES-128 forward cipher, exposed whole and as
//!   individually testable round steps.
//! * [`ccmp`] — CCMP frame protection: MIC IV / AAD construction,
//!   sequential CBC-MAC, counter-mode encryption, and the
//!   verify-and-decrypt path.
//! * [`icbc`] — N-way interleaved CBC-MAC: payload blocks are assigned
//!   round-robin to N independent CBC lanes whose tags are XOR-merged.
//!   With N = 1 it degenerates byte-for-byte to the sequential CBC-MAC.
//! * [`bench`] — measurement harness: per-component timing, throughput,
//!   size sweeps, and sequential-vs-interleaved comparison reports.
//!
//! # Security caveats
//!
//! **Nothing in this crate is constant-time.** The S-box is a table
//! lookup, the GF(2^8) arithmetic branches on data bits, and the MIC
//! comparison is an ordinary byte equality. The crate exists to study
//! throughput, not side channels — do not use it to protect real traffic.
//!
//! The interleaved MIC mode (N ≥ 2) is additionally **nonstandard**: no
//! deployed CCMP peer will interoperate with it, and no forgery-resistance
//! claim is made for the XOR merge of lane tags.

pub mod aes;
pub mod bench;
pub mod ccmp;
pub mod icbc;

pub use aes::{expand_key, Block, Cipher, Key128, RoundKeySchedule};
pub use ccmp::{ccmp_decrypt, ccmp_encrypt, CcmpError, MicEngine, MicTag, Mpdu, MpduHeader, ProtectedMpdu};
pub use icbc::{interleaved_cbc_mac, IcbcConfig, IcbcError};
