//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{
    corpus, deglex, dense_rref_mod_p, dense_rref_q, diamond_check, random_sparse_q, random_sparse_zp, reduce,
    rows_to_dense, run_system, to_dense, Poly, Run,
};
use ncgb::f4::GbConfig;
use ncgb::field::{Field, PrimeField, Rationals};
use ncgb::linalg::rational::{rref_multimodular, MultiModularConfig};
use ncgb::linalg::zp::{mersenne_reduce, rref_mod_p};
use ncgb::linalg::SparseMatrix;
use ncgb::proof::{verify, ProofMode, Source};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZP_MATRICES: usize = 500;
const ZP_MAX_ROWS: usize = 60;
const ZP_MAX_COLS: usize = 80;
const ZP_PRIMES: [u32; 4] = [2, 7, 2147483647, 2147483629];
const ZP_SEED: u64 = 0x5eed_0001;
const MERSENNE_WINDOW: u64 = 1 << 16;
const MERSENNE_RANDOM: usize = 10_000_000;
const THREAD_COUNTS: [usize; 4] = [1, 2, 4, 8];
const Q_MATRICES: usize = 200;
const Q_MAX_ROWS: usize = 30;
const Q_MAX_COLS: usize = 40;
const Q_MAX_ENTRY: i64 = 10_000;
const TRUNCATION_BOUNDS: [usize; 3] = [5, 7, 10];
const MIN_SYSTEMS: usize = 10;
const CHECK_PRIME: u64 = 2147483647;

/// Runtime budgets in seconds, per criterion.
const BUDGET: [u64; 9] = [60, 30, 60, 120, 5, 120, 60, 120, 120];

type Outcome = Result<String, String>;

fn zp_corpus() -> Vec<(SparseMatrix<u32>, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(ZP_SEED);
    (0..ZP_MATRICES)
        .map(|k| {
            let p = ZP_PRIMES[k % ZP_PRIMES.len()];
            (random_sparse_zp(&mut rng, ZP_MAX_ROWS, ZP_MAX_COLS, p), p)
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut mismatches = 0;
    for (m, p) in zp_corpus() {
        let out = rref_mod_p(&m, p, 1, false).map_err(|e| e.to_string())?;
        let dense: Vec<Vec<u64>> = to_dense(&m, &0u32)
            .into_iter()
            .map(|r| r.into_iter().map(u64::from).collect())
            .collect();
        let expected = dense_rref_mod_p(&dense, p as u64);
        let got: Vec<Vec<u64>> = rows_to_dense(&out.echelon.rows, m.ncols, &0u32)
            .into_iter()
            .map(|r| r.into_iter().map(u64::from).collect())
            .collect();
        if got != expected {
            mismatches += 1;
        }
    }
    if mismatches == 0 {
        Ok(format!("{ZP_MATRICES} matrices, 0 mismatches"))
    } else {
        Err(format!("{mismatches} of {ZP_MATRICES} matrices differ from dense elimination"))
    }
}

fn criterion_2() -> Outcome {
    let p = (1u64 << 31) - 1;
    let mut mismatches = 0u64;
    let mut checked = 0u64;
    for v in (1u64 << 31) - MERSENNE_WINDOW..=(1u64 << 31) + MERSENNE_WINDOW {
        mismatches += (mersenne_reduce(v, 31) != v % p) as u64;
        checked += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..MERSENNE_RANDOM {
        let v = rng.gen_range(0..1u64 << 62);
        mismatches += (mersenne_reduce(v, 31) != v % p) as u64;
        checked += 1;
    }
    if mismatches == 0 {
        Ok(format!("{checked} values, 0 mismatches"))
    } else {
        Err(format!("{mismatches} mismatches among {checked} values"))
    }
}

fn criterion_3() -> Outcome {
    let mut differing = 0;
    for (m, p) in zp_corpus() {
        let base = rref_mod_p(&m, p, THREAD_COUNTS[0], false).map_err(|e| e.to_string())?;
        for &t in &THREAD_COUNTS[1..] {
            let other = rref_mod_p(&m, p, t, false).map_err(|e| e.to_string())?;
            if other.echelon != base.echelon {
                differing += 1;
            }
        }
    }
    if differing == 0 {
        Ok(format!("{ZP_MATRICES} matrices x threads {THREAD_COUNTS:?}, bit-identical"))
    } else {
        Err(format!("{differing} (matrix, thread count) pairs differ"))
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut mismatches = Vec::new();
    for k in 0..Q_MATRICES {
        let m = random_sparse_q(&mut rng, Q_MAX_ROWS, Q_MAX_COLS, Q_MAX_ENTRY);
        let expected = dense_rref_q(&to_dense(&m, &BigRational::zero()));
        for tracer in [false, true] {
            let config = MultiModularConfig { tracer, ..Default::default() };
            let out = rref_multimodular(&m, &config).map_err(|e| e.to_string())?;
            if rows_to_dense(&out.echelon.rows, m.ncols, &BigRational::zero()) != expected {
                mismatches.push((k, tracer));
            }
        }
    }
    if mismatches.is_empty() {
        Ok(format!("{Q_MATRICES} matrices, tracer off and on, 0 mismatches"))
    } else {
        Err(format!("mismatches (matrix, tracer): {mismatches:?}"))
    }
}

fn criterion_5() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("xyx.txt");
    std::fs::write(&file, "vars x y\norder deglex\nchar 0\npoly x*y*x - x*y\n").map_err(|e| e.to_string())?;
    let mut sizes = Vec::new();
    for d in TRUNCATION_BOUNDS {
        let out = Command::new(env!("CARGO_BIN_EXE_ncgb"))
            .args(["compute", file.to_str().unwrap(), "--degbound", &d.to_string()])
            .output()
            .map_err(|e| e.to_string())?;
        let expected: Vec<String> = (1..=d - 3)
            .map(|n| if n == 1 { "x*y*x - x*y".into() } else { format!("x*y^{n}*x - x*y^{n}") })
            .collect();
        let got: Vec<String> = String::from_utf8_lossy(&out.stdout).lines().map(str::to_string).collect();
        if got != expected {
            return Err(format!("D = {d}: got {got:?}"));
        }
        if out.status.code() != Some(2) {
            return Err(format!("D = {d}: exit code {:?}", out.status.code()));
        }
        sizes.push(got.len());
    }
    Ok(format!("D = {TRUNCATION_BOUNDS:?} gives {sizes:?} elements, exit 2"))
}

fn criterion_6() -> Outcome {
    let systems = corpus();
    if systems.len() < MIN_SYSTEMS {
        return Err(format!("only {} systems", systems.len()));
    }
    let mut ambiguities = 0;
    for sys in &systems {
        let run = run_system(&Rationals, sys, &GbConfig::default());
        let basis = run.basis();
        ambiguities += diamond_check(&Rationals, &basis, sys.bound, &deglex).map_err(|e| format!("{}: {e}", sys.name))?;
        for f in run.input_polys() {
            if !reduce(&Rationals, &f, &basis, &deglex).is_zero() {
                return Err(format!("{}: an input does not reduce to 0", sys.name));
            }
        }
    }
    Ok(format!("{} systems, {ambiguities} ambiguities resolve, inputs reduce to 0", systems.len()))
}

fn expand<F: Field>(field: &F, run: &Run<F>, cert: &ncgb::proof::Certificate<F::Elem>) -> bool {
    let inputs = run.input_polys();
    let basis = run.basis();
    let mut acc = Poly::zero();
    for t in &cert.terms {
        let src = match t.source {
            Source::Input(j) => &inputs[j],
            Source::Basis(k) => &basis[k],
        };
        acc.add_scaled(field, &t.coeff, run.arena.word(t.left), src, run.arena.word(t.right));
    }
    acc.add_scaled(field, &field.neg(&field.one()), &[], &basis[cert.target], &[]);
    acc.is_zero()
}

fn criterion_7() -> Outcome {
    let mut verified = 0;
    let mut mutations = 0;
    for mode in [ProofMode::Incremental, ProofMode::Full] {
        for sys in corpus() {
            let config = GbConfig { proof: mode, ..GbConfig::default() };
            let mut run = run_system(&Rationals, &sys, &config);
            let certs = run.output.certificates.clone().ok_or("no certificates")?;
            let basis = run.output.basis.clone();
            for cert in &certs {
                if mode == ProofMode::Full && !cert.is_full() {
                    return Err(format!("{}: g{} is not over the inputs", sys.name, cert.target + 1));
                }
                let ok = verify(&Rationals, &mut run.arena, cert, &run.inputs, &basis).map_err(|e| e.to_string())?;
                if !ok || !expand(&Rationals, &run, cert) {
                    return Err(format!("{} ({mode:?}): g{} does not verify", sys.name, cert.target + 1));
                }
                verified += 1;
                for k in 0..cert.terms.len() {
                    let mut bad = cert.clone();
                    bad.terms[k].coeff += BigRational::from_integer(1.into());
                    let still = verify(&Rationals, &mut run.arena, &bad, &run.inputs, &basis).map_err(|e| e.to_string())?;
                    if still {
                        return Err(format!("{}: mutated g{} still verifies", sys.name, cert.target + 1));
                    }
                    mutations += 1;
                }
            }
        }
    }
    Ok(format!("{verified} certificates verify, {mutations} mutations rejected"))
}

fn criterion_8() -> Outcome {
    let p = PrimeField::new(CHECK_PRIME).map_err(|e| e.to_string())?;
    let systems = corpus();
    for sys in &systems {
        let q = run_system(&Rationals, sys, &GbConfig::default()).leading_words();
        let zp = run_system(&p, sys, &GbConfig::default()).leading_words();
        if q != zp {
            return Err(format!("{}: leading monomials differ", sys.name));
        }
    }
    Ok(format!("{} systems agree over Q and Z_{CHECK_PRIME}", systems.len()))
}

fn criterion_9() -> Outcome {
    let systems = corpus();
    let mut filtered = 0;
    for sys in &systems {
        let off = run_system(&Rationals, sys, &GbConfig::default());
        let on = run_system(&Rationals, sys, &GbConfig { gm_filter: true, ..GbConfig::default() });
        if off.leading_words() != on.leading_words() {
            return Err(format!("{}: leading monomials differ with the filter", sys.name));
        }
        filtered += on.output.filtered_ambiguities;
    }
    Ok(format!("{} systems identical, {filtered} ambiguities filtered", systems.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Z_p RREF matches dense elimination", criterion_1),
        ("Mersenne reduction", criterion_2),
        ("parallel determinism", criterion_3),
        ("multi-modular RREF matches exact elimination", criterion_4),
        ("xyx - xy truncation shape", criterion_5),
        ("diamond lemma", criterion_6),
        ("certificate soundness", criterion_7),
        ("Q vs Z_p leading monomials", criterion_8),
        ("GM filter neutrality", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let budget = Duration::from_secs(BUDGET[i]);
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget of {}s", BUDGET[i])),
            other => other,
        };
        let (verdict, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += outcome.is_err() as usize;
        println!("criterion {}: {verdict} {name} ({detail}; {:.2}s)", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
