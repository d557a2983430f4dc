//! Cross-checks the cipher against the independent row-major reference
//! in `common` and against the FIPS-197 appendix tables, including every
//! intermediate round state of the Appendix B walkthrough.

mod common;

use ccmp_icbc::aes::{
    add_round_key, encrypt_block, expand_key, mix_columns, shift_rows, sub_bytes, Block, Key128,
};
use common::RefAes;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn blk(hex: &str) -> [u8; 16] {
    let mut out = [0u8; 16];
    for (i, o) in out.iter_mut().enumerate() {
        *o = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).unwrap();
    }
    out
}

const APPENDIX_B_KEY: &str = "2b7e151628aed2a6abf7158809cf4f3c";
const APPENDIX_B_PLAINTEXT: &str = "3243f6a8885a308d313198a2e0370734";
const APPENDIX_B_CIPHERTEXT: &str = "3925841d02dc09fbdc118597196a0b32";

/// FIPS-197 Appendix A.1: the full expanded schedule.
const APPENDIX_A1_ROUND_KEYS: [&str; 11] = [
    "2b7e151628aed2a6abf7158809cf4f3c",
    "a0fafe1788542cb123a339392a6c7605",
    "f2c295f27a96b9435935807a7359f67f",
    "3d80477d4716fe3e1e237e446d7a883b",
    "ef44a541a8525b7fb671253bdb0bad00",
    "d4d1c6f87c839d87caf2b8bc11f915bc",
    "6d88a37a110b3efddbf98641ca0093fd",
    "4e54f70e5f5fc9f384a64fb24ea6dc4f",
    "ead27321b58dbad2312bf5607f8d292f",
    "ac7766f319fadc2128d12941575c006e",
    "d014f9a8c9ee2589e13f0cc8b6630ca6",
];

/// FIPS-197 Appendix B: the state at the start of each round.
const APPENDIX_B_ROUND_STARTS: [&str; 10] = [
    "193de3bea0f4e22b9ac68d2ae9f84808",
    "a49c7ff2689f352b6b5bea43026a5049",
    "aa8f5f0361dde3ef82d24ad26832469a",
    "486c4eee671d9d0d4de3b138d65f58e7",
    "e0927fe8c86363c0d9b1355085b8be01",
    "f1006f55c1924cef7cc88b325db5d50c",
    "260e2e173d41b77de86472a9fdd28b25",
    "5a4142b11949dc1fa3e019657a8c040c",
    "ea835cf00445332d655d98ad8596b0c5",
    "eb40f21e592e38848ba113e71bc342d2",
];

#[test]
fn reference_aes_reproduces_fips_vectors() {
    // Validate the oracle itself first.
    let c1 = RefAes::new(std::array::from_fn(|i| i as u8));
    assert_eq!(
        c1.encrypt(blk("00112233445566778899aabbccddeeff")),
        blk("69c4e0d86a7b0430d8cdb78070b4c55a")
    );

    let b = RefAes::new(blk(APPENDIX_B_KEY));
    assert_eq!(b.encrypt(blk(APPENDIX_B_PLAINTEXT)), blk(APPENDIX_B_CIPHERTEXT));
    for (round, expected) in APPENDIX_A1_ROUND_KEYS.iter().enumerate() {
        assert_eq!(b.round_key(round), blk(expected), "reference round key {round}");
    }
}

#[test]
fn implementation_matches_reference_on_random_inputs() {
    let mut rng = StdRng::seed_from_u64(0xae5_u64);
    for _ in 0..2_000 {
        let key: [u8; 16] = rng.gen();
        let pt: [u8; 16] = rng.gen();
        let schedule = expand_key(&Key128(key));
        let reference = RefAes::new(key);
        assert_eq!(encrypt_block(&schedule, Block(pt)).0, reference.encrypt(pt));
    }
}

#[test]
fn expand_key_reproduces_appendix_a1() {
    let schedule = expand_key(&Key128(blk(APPENDIX_B_KEY)));
    for (round, expected) in APPENDIX_A1_ROUND_KEYS.iter().enumerate() {
        assert_eq!(
            schedule.round_keys()[round],
            Block(blk(expected)),
            "round key {round}"
        );
    }
}

#[test]
fn round_pipeline_reproduces_appendix_b_states() {
    let schedule = expand_key(&Key128(blk(APPENDIX_B_KEY)));
    let rk = schedule.round_keys();

    let mut state = add_round_key(Block(blk(APPENDIX_B_PLAINTEXT)), rk[0]);
    for round in 1..=9 {
        assert_eq!(
            state,
            Block(blk(APPENDIX_B_ROUND_STARTS[round - 1])),
            "state entering round {round}"
        );
        state = add_round_key(mix_columns(shift_rows(sub_bytes(state))), rk[round]);
    }
    assert_eq!(state, Block(blk(APPENDIX_B_ROUND_STARTS[9])), "state entering round 10");
    state = add_round_key(shift_rows(sub_bytes(state)), rk[10]);
    assert_eq!(state, Block(blk(APPENDIX_B_CIPHERTEXT)));
}

#[test]
fn encrypt_block_is_injective_on_sampled_plaintexts() {
    let schedule = expand_key(&Key128([0x5c; 16]));
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..10_000 {
        let a: [u8; 16] = rng.gen();
        let mut b = a;
        // Force a difference in one random byte.
        let idx = rng.gen_range(0..16);
        b[idx] ^= rng.gen_range(1..=255u8);
        assert_ne!(
            encrypt_block(&schedule, Block(a)),
            encrypt_block(&schedule, Block(b))
        );
    }
}

#[test]
fn reference_sbox_matches_crate_table() {
    assert_eq!(common::ref_sbox(), ccmp_icbc::aes::generate_sbox());
    assert_eq!(ccmp_icbc::aes::verify_sbox_table(), Ok(()));
}

#[test]
fn reference_gf_mul_agrees_with_fips_example() {
    // {57} x {83} = {c1} from the FIPS-197 arithmetic walkthrough.
    assert_eq!(common::ref_gf_mul(0x57, 0x83), 0xc1);
    assert_eq!(common::ref_gf_mul(0xdb, 0x02) ^ common::ref_gf_mul(0x13, 0x03) ^ 0x53 ^ 0x45, 0x8e);
}
