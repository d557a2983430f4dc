//! Command-line surface for the ccmp-icbc crate: built-in vector suites,
//! frame encryption/decryption, MIC computation, and benchmark runs.
//!
//! Exit codes: 0 success, 1 authentication failure, 2 usage/input error.
//! Success output goes to stdout (lowercase hex, machine-parseable);
//! diagnostics go to stderr.

use ccmp_icbc::aes::{encrypt_block, expand_key, generate_sbox, verify_sbox_table, Block, Key128};
use ccmp_icbc::bench::{
    compare, run_suite, write_csv, BenchConfig, BenchRecord, ComparisonReport, EngineKind,
    LinearFit,
};
use ccmp_icbc::ccmp::{
    calculate_mic, ccmp_decrypt, ccmp_encrypt, construct_mic_header1, construct_mic_header2,
    construct_mic_iv, CcmpError, MicEngine, MicTag, Mpdu, MpduHeader, ProtectedMpdu,
    HEADER_WIRE_LEN, MIC_LEN,
};
use ccmp_icbc::icbc::{interleaved_cbc_mac, IcbcConfig};
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ccmp-icbc",
    about = "AES-128 CCMP frame protection with an N-way interleaved CBC-MAC engine",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct EngineArgs {
    /// MIC lanes: 1 is the standard sequential CBC-MAC, 2 the 2-way
    /// interleaved mode
    #[arg(long, default_value_t = 1)]
    lanes: usize,
    /// Concurrent lane executors (defaults to the lane count)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in vector suites and exit 0 only if all pass
    Selftest,
    /// Encrypt a frame: prints hex ciphertext, then hex encrypted MIC
    Encrypt {
        /// Cipher key, 32 hex characters
        #[arg(long)]
        key: String,
        /// Serialized header (fc‖a1‖a2‖a3‖sc‖priority‖pn), 58 hex characters
        #[arg(long)]
        header: String,
        /// Plaintext payload, hex, at most 2296 bytes
        #[arg(long)]
        payload: String,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Verify and decrypt a frame: prints hex plaintext, or AUTH-FAIL
    Decrypt {
        #[arg(long)]
        key: String,
        #[arg(long)]
        header: String,
        /// Ciphertext, hex
        #[arg(long)]
        ciphertext: String,
        /// Encrypted MIC, 16 hex characters
        #[arg(long)]
        mic: String,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Compute a frame's MIC: prints 16 hex characters
    Mic {
        #[arg(long)]
        key: String,
        #[arg(long)]
        header: String,
        #[arg(long)]
        payload: String,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run the benchmark sweep and write record + comparison CSVs
    Bench {
        /// Payload sizes in bytes (default: 16,32,48,64 plus 1 KiB,
        /// 16 KiB, 256 KiB, 1 MiB)
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Timed repetitions per size and engine
        #[arg(long, default_value_t = 1000)]
        reps: u32,
        /// Lanes for the interleaved arm
        #[arg(long, default_value_t = 2)]
        lanes: usize,
        #[arg(long)]
        workers: Option<usize>,
        /// Record CSV path; the comparison CSV lands next to it as
        /// <stem>.compare.csv
        #[arg(long)]
        csv: PathBuf,
    },
    /// Compare two record CSVs produced by `bench`
    Compare {
        /// Baseline record CSV
        baseline: PathBuf,
        /// Optimized record CSV
        optimized: PathBuf,
        /// Write the comparison CSV here instead of stdout
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Selftest => Ok(selftest()),
        Command::Encrypt {
            key,
            header,
            payload,
            engine,
        } => encrypt(&key, &header, &payload, &engine),
        Command::Decrypt {
            key,
            header,
            ciphertext,
            mic,
            engine,
        } => decrypt(&key, &header, &ciphertext, &mic, &engine),
        Command::Mic {
            key,
            header,
            payload,
            engine,
        } => mic(&key, &header, &payload, &engine),
        Command::Bench {
            sizes,
            reps,
            lanes,
            workers,
            csv,
        } => bench(sizes, reps, lanes, workers, &csv),
        Command::Compare {
            baseline,
            optimized,
            csv,
        } => compare_files(&baseline, &optimized, csv.as_deref()),
    }
}

fn parse_hex(name: &str, value: &str) -> Result<Vec<u8>, String> {
    hex::decode(value).map_err(|e| format!("{name}: invalid hex: {e}"))
}

fn parse_hex_exact(name: &str, value: &str, bytes: usize) -> Result<Vec<u8>, String> {
    let decoded = parse_hex(name, value)?;
    if decoded.len() != bytes {
        return Err(format!(
            "{name}: expected {} hex characters ({bytes} bytes), got {}",
            2 * bytes,
            value.len()
        ));
    }
    Ok(decoded)
}

fn parse_key(value: &str) -> Result<Key128, String> {
    let bytes = parse_hex_exact("--key", value, 16)?;
    Ok(Key128(bytes.try_into().unwrap()))
}

fn parse_header(value: &str) -> Result<MpduHeader, String> {
    let bytes = parse_hex_exact("--header", value, HEADER_WIRE_LEN)?;
    MpduHeader::from_bytes(&bytes).map_err(|e| format!("--header: {e}"))
}

fn select_engine(args: &EngineArgs) -> Result<MicEngine, String> {
    let workers = args.workers.unwrap_or(args.lanes);
    let config = IcbcConfig::new(args.lanes, workers)
        .map_err(|e| format!("--lanes/--workers: {e}"))?;
    Ok(if config.lanes() == 1 {
        MicEngine::Sequential
    } else {
        MicEngine::Interleaved(config)
    })
}

fn encrypt(key: &str, header: &str, payload: &str, engine: &EngineArgs) -> Result<ExitCode, String> {
    let key = parse_key(key)?;
    let header = parse_header(header)?;
    let payload = parse_hex("--payload", payload)?;
    let engine = select_engine(engine)?;
    let mpdu = Mpdu::new(header, payload).map_err(|e| format!("--payload: {e}"))?;

    let protected = ccmp_encrypt(&key, &mpdu, engine).map_err(|e| e.to_string())?;
    println!("{}", hex::encode(&protected.ciphertext));
    println!("{}", hex::encode(protected.encrypted_mic));
    Ok(ExitCode::SUCCESS)
}

fn decrypt(
    key: &str,
    header: &str,
    ciphertext: &str,
    mic: &str,
    engine: &EngineArgs,
) -> Result<ExitCode, String> {
    let key = parse_key(key)?;
    let header = parse_header(header)?;
    let ciphertext = parse_hex("--ciphertext", ciphertext)?;
    let mic = parse_hex_exact("--mic", mic, MIC_LEN)?;
    let engine = select_engine(engine)?;
    if ciphertext.len() > ccmp_icbc::ccmp::MAX_PAYLOAD {
        return Err(format!(
            "--ciphertext: {}",
            CcmpError::PayloadTooLong(ciphertext.len())
        ));
    }

    let protected = ProtectedMpdu {
        header,
        ciphertext,
        encrypted_mic: mic.try_into().unwrap(),
    };
    match ccmp_decrypt(&key, &protected, engine) {
        Ok(mpdu) => {
            println!("{}", hex::encode(mpdu.payload()));
            Ok(ExitCode::SUCCESS)
        }
        Err(CcmpError::AuthFailure) => {
            println!("AUTH-FAIL");
            eprintln!("error: MIC verification failed");
            Ok(ExitCode::from(1))
        }
        Err(other) => Err(other.to_string()),
    }
}

fn mic(key: &str, header: &str, payload: &str, engine: &EngineArgs) -> Result<ExitCode, String> {
    let key = parse_key(key)?;
    let header = parse_header(header)?;
    let payload = parse_hex("--payload", payload)?;
    let engine = select_engine(engine)?;

    let schedule = expand_key(&key);
    let b0 = construct_mic_iv(&header, payload.len()).map_err(|e| format!("--payload: {e}"))?;
    let aad1 = construct_mic_header1(&header);
    let aad2 = construct_mic_header2(&header);
    let tag = engine.compute(&schedule, b0, aad1, aad2, &payload);
    println!("{}", hex::encode(tag.0));
    Ok(ExitCode::SUCCESS)
}

fn bench(
    sizes: Option<Vec<usize>>,
    reps: u32,
    lanes: usize,
    workers: Option<usize>,
    csv_path: &Path,
) -> Result<ExitCode, String> {
    let sizes = sizes.unwrap_or_else(BenchConfig::default_sizes);
    let workers = workers.unwrap_or(lanes);
    let config = BenchConfig::new(sizes, reps, lanes, workers).map_err(|e| e.to_string())?;

    eprintln!(
        "benchmarking {} sizes x 2 engines, {} reps each (lanes {}, workers {})",
        config.sizes.len(),
        config.reps,
        config.lanes,
        config.workers
    );
    let records = run_suite(&config).map_err(|e| e.to_string())?;

    let file = File::create(csv_path)
        .map_err(|e| format!("--csv: cannot write {}: {e}", csv_path.display()))?;
    let mut out = BufWriter::new(file);
    write_csv(&records, &mut out).map_err(|e| format!("--csv: {e}"))?;
    out.flush().map_err(|e| format!("--csv: {e}"))?;

    let baseline: Vec<BenchRecord> = records
        .iter()
        .filter(|r| r.engine == EngineKind::Sequential)
        .cloned()
        .collect();
    let optimized: Vec<BenchRecord> = records
        .iter()
        .filter(|r| r.engine == EngineKind::Icbc)
        .cloned()
        .collect();
    let report = compare(&baseline, &optimized).map_err(|e| e.to_string())?;

    let compare_path = comparison_path(csv_path);
    let file = File::create(&compare_path)
        .map_err(|e| format!("cannot write {}: {e}", compare_path.display()))?;
    let mut out = BufWriter::new(file);
    report
        .write_csv(&mut out)
        .map_err(|e| format!("{}: {e}", compare_path.display()))?;
    out.flush().map_err(|e| e.to_string())?;

    print_summary(&report, config.lanes, config.workers);
    println!("wrote {}", csv_path.display());
    println!("wrote {}", compare_path.display());
    Ok(ExitCode::SUCCESS)
}

fn comparison_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path.file_stem().unwrap_or_default().to_os_string();
    let mut name = stem;
    name.push(".compare.csv");
    csv_path.with_file_name(name)
}

fn print_summary(report: &ComparisonReport, lanes: usize, workers: usize) {
    for row in &report.rows {
        println!(
            "size {:>8}: t_total {:+.2}%, throughput {:+.2}%, calc_mic {:+.2}%, critical-path ratio {:.3}",
            row.size_bytes,
            row.pct_time_change,
            row.pct_throughput_change,
            row.pct_calc_mic_change,
            row.critical_path_ratio
        );
    }
    let fit = |label: &str, f: &LinearFit| {
        println!(
            "fit {label}: slope {:.4} ns/B, intercept {:.0} ns, R^2 {:.5}",
            f.slope, f.intercept, f.r_squared
        );
    };
    fit("sequential", &report.baseline_fit);
    fit(&format!("icbc-{lanes}x{workers}"), &report.optimized_fit);
}

fn compare_files(
    baseline: &Path,
    optimized: &Path,
    csv_out: Option<&Path>,
) -> Result<ExitCode, String> {
    let read = |path: &Path| -> Result<Vec<BenchRecord>, String> {
        let file =
            File::open(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        ccmp_icbc::bench::read_csv(BufReader::new(file))
            .map_err(|e| format!("{}: {e}", path.display()))
    };
    let baseline = read(baseline)?;
    let optimized = read(optimized)?;
    let report = compare(&baseline, &optimized).map_err(|e| e.to_string())?;

    match csv_out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| format!("--csv: cannot write {}: {e}", path.display()))?;
            let mut out = BufWriter::new(file);
            report.write_csv(&mut out).map_err(|e| e.to_string())?;
            out.flush().map_err(|e| e.to_string())?;
            print_summary(&report, 0, 0);
            println!("wrote {}", path.display());
        }
        None => {
            let stdout = std::io::stdout();
            report
                .write_csv(&mut stdout.lock())
                .map_err(|e| e.to_string())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// Self test
// ---------------------------------------------------------------------------

struct VectorCheck {
    name: &'static str,
    actual: Vec<u8>,
    expected: Vec<u8>,
}

fn check(name: &'static str, actual: Vec<u8>, expected: &str) -> VectorCheck {
    VectorCheck {
        name,
        actual,
        expected: hex::decode(expected).expect("baked-in vector is valid hex"),
    }
}

fn run_group(label: &str, checks: Vec<VectorCheck>) -> bool {
    let mut ok = true;
    for c in &checks {
        if c.actual != c.expected {
            println!(
                "FAIL {label}/{}: expected {} got {}",
                c.name,
                hex::encode(&c.expected),
                hex::encode(&c.actual)
            );
            ok = false;
        }
    }
    println!(
        "group {label}: {} ({} vectors)",
        if ok { "PASS" } else { "FAIL" },
        checks.len()
    );
    ok
}

fn selftest() -> ExitCode {
    let mut all_ok = true;

    // AES vectors, cross-checked against FIPS-197 appendices.
    {
        let mut checks = Vec::new();
        if let Err(mismatch) = verify_sbox_table() {
            println!("FAIL aes/sbox-table: {mismatch}");
            all_ok = false;
        }
        checks.push(check(
            "sbox-generated",
            generate_sbox()[..4].to_vec(),
            "637c777b",
        ));
        let schedule = expand_key(&Key128(std::array::from_fn(|i| i as u8)));
        checks.push(check(
            "fips-c1-ciphertext",
            encrypt_block(&schedule, Block(hex_block("00112233445566778899aabbccddeeff")))
                .0
                .to_vec(),
            "69c4e0d86a7b0430d8cdb78070b4c55a",
        ));
        let schedule = expand_key(&Key128(hex_block("2b7e151628aed2a6abf7158809cf4f3c")));
        checks.push(check(
            "fips-b-ciphertext",
            encrypt_block(&schedule, Block(hex_block("3243f6a8885a308d313198a2e0370734")))
                .0
                .to_vec(),
            "3925841d02dc09fbdc118597196a0b32",
        ));
        checks.push(check(
            "fips-a1-round-key-1",
            schedule.round_keys()[1].0.to_vec(),
            "a0fafe1788542cb123a339392a6c7605",
        ));
        checks.push(check(
            "zero-key-round-key-1",
            expand_key(&Key128([0; 16])).round_keys()[1].0.to_vec(),
            "62636363626363636263636362636363",
        ));
        all_ok &= run_group("aes", checks);
    }

    // CCMP golden vectors for the fixed zero-key frame.
    {
        let header = MpduHeader::new(0, [0; 6], [0; 6], [0; 6], 0, 0, 0).unwrap();
        let golden_header = MpduHeader::new(
            0,
            [0; 6],
            [0x02, 0, 0, 0, 0, 0x01],
            [0; 6],
            0,
            0,
            5,
        )
        .unwrap();
        let key = Key128([0; 16]);
        let schedule = expand_key(&key);
        let payload: Vec<u8> = (0..16).collect();
        let mic = calculate_mic(
            &schedule,
            construct_mic_iv(&header, 16).unwrap(),
            construct_mic_header1(&header),
            construct_mic_header2(&header),
            &payload,
        );
        let protected = ccmp_encrypt(
            &key,
            &Mpdu::new(header, payload).unwrap(),
            MicEngine::Sequential,
        )
        .unwrap();

        let checks = vec![
            check(
                "mic-iv-layout",
                construct_mic_iv(&golden_header, 16).unwrap().0.to_vec(),
                "59000200000000010000000000050010",
            ),
            check(
                "aad1-layout",
                construct_mic_header1(&header).0.to_vec(),
                "00160040000000000000000000000000",
            ),
            check("frame-mic", mic.0.to_vec(), "c3990a1bd5aced92"),
            check(
                "frame-ciphertext",
                protected.ciphertext.clone(),
                "d579f00e04908a6b58673c7d92a0c061",
            ),
            check(
                "frame-encrypted-mic",
                protected.encrypted_mic.to_vec(),
                "84e8120d3cb18262",
            ),
        ];
        all_ok &= run_group("ccmp", checks);
    }

    // Interleaved engine: N=1 degeneration spot checks and the 2-lane
    // golden tag.
    {
        let key = Key128([0; 16]);
        let schedule = expand_key(&key);
        let header = MpduHeader::new(0, [0; 6], [0; 6], [0; 6], 0, 0, 0).unwrap();
        let single = IcbcConfig::new(1, 1).unwrap();

        let mut checks = Vec::new();
        for len in [0usize, 1, 16, 17, 64] {
            let payload: Vec<u8> = (0..len).map(|i| (i * 13 + 7) as u8).collect();
            let b0 = construct_mic_iv(&header, len).unwrap();
            let aad1 = construct_mic_header1(&header);
            let aad2 = construct_mic_header2(&header);
            let sequential = calculate_mic(&schedule, b0, aad1, aad2, &payload);
            let interleaved = interleaved_cbc_mac(&schedule, b0, aad1, aad2, &payload, &single);
            checks.push(VectorCheck {
                name: "n1-degeneration",
                actual: interleaved.0.to_vec(),
                expected: sequential.0.to_vec(),
            });
        }
        let payload: Vec<u8> = (0..64).collect();
        let two = IcbcConfig::new(2, 1).unwrap();
        let tag: MicTag = interleaved_cbc_mac(
            &schedule,
            construct_mic_iv(&header, 64).unwrap(),
            construct_mic_header1(&header),
            construct_mic_header2(&header),
            &payload,
            &two,
        );
        checks.push(check("icbc2-golden", tag.0.to_vec(), "d9696075787f4163"));
        all_ok &= run_group("icbc", checks);
    }

    if all_ok {
        println!("all vector groups passed");
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn hex_block(hex: &str) -> [u8; 16] {
    hex::decode(hex).unwrap().try_into().unwrap()
}
