//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test --test acceptance -- --nocapture` to see them all.

use fibjones::braid::{BraidWord, MarkovMove};
use fibjones::compiler::{
    compile, crossing_permutation_steps, encoding_efficiency, estimate_jones_dqc1,
    split_shift_steps, steps_are_permutation, BitField, Layout, PermStep, ShiftDir,
};
use fibjones::dqc1::{clean_ancilla_wrap, projected_trace, simulate_clean_ancillas, DenseUnitary};
use fibjones::fibrep::{
    constants, crossing_operator, enumerate_sector, fibonacci, zeckendorf_decode,
    zeckendorf_encode, Sector, Symbol,
};
use fibjones::jones::{
    block_square_residuals, jones_value, markov_contraction_check, tl_relation_residuals,
    weighted_trace,
};
use fibjones::linalg::{
    identity_like, is_unitary, mat_trace, max_abs_diff, random_unitary, unitarity_residual,
};
use fibjones::oracle::oracle_jones;
use fibjones::parse_braid;
use fibjones::reduction::{
    block_constructions, block_factors_product, density_report, inchworm_swap, preimage_census,
    seven_block_decompose, two_level_decompose, two_level_reconstruct, FiveBlockSpace,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn random_braid<R: Rng>(rng: &mut R, min_n: usize, max_n: usize, max_len: usize) -> BraidWord {
    let n = rng.gen_range(min_n..=max_n);
    let len = rng.gen_range(0..=max_len);
    let word = (0..len)
        .map(|_| {
            let i = rng.gen_range(1..n) as i32;
            if rng.gen_bool(0.5) {
                i
            } else {
                -i
            }
        })
        .collect();
    BraidWord::new(n, word).unwrap()
}

/// Every braid word over ±σ₁..±σ_{n−1} up to the given length.
fn exhaustive_braids(n: usize, max_len: usize) -> Vec<BraidWord> {
    let gens: Vec<i32> = (1..n as i32).flat_map(|i| [i, -i]).collect();
    let mut out = vec![BraidWord::identity(n).unwrap()];
    let mut frontier: Vec<Vec<i32>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &g in &gens {
                let mut w2 = w.clone();
                w2.push(g);
                out.push(BraidWord::new(n, w2.clone()).unwrap());
                next.push(w2);
            }
        }
        frontier = next;
    }
    out
}

#[test]
fn criterion_01_oracle_equivalence() {
    let started = Instant::now();
    let mut checked = 0usize;
    for n in 1..=4usize {
        for b in exhaustive_braids(n, 4) {
            let exact = jones_value(&b).value;
            let oracle = oracle_jones(&b).unwrap();
            assert!(
                (exact - oracle).norm() <= 1e-9,
                "disagreement on {b}: {exact} vs {oracle}"
            );
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for _ in 0..200 {
        let b = random_braid(&mut rng, 2, 6, 8);
        let exact = jones_value(&b).value;
        let oracle = oracle_jones(&b).unwrap();
        assert!((exact - oracle).norm() <= 1e-9, "disagreement on {b}");
        checked += 1;
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() <= 60, "runtime {elapsed:?} over budget");
    println!(
        "criterion 01 (oracle equivalence, {checked} braids in {:.2?}): PASS",
        elapsed
    );
}

#[test]
fn criterion_02_markov_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    for _ in 0..100 {
        let b = random_braid(&mut rng, 2, 5, 8);
        let v = jones_value(&b).value;
        let g = {
            let i = rng.gen_range(1..b.strands()) as i32;
            if rng.gen_bool(0.5) {
                i
            } else {
                -i
            }
        };
        let conj = b.markov_move(MarkovMove::Conjugate(g)).unwrap();
        assert!(
            (jones_value(&conj).value - v).norm() <= 1e-9,
            "conjugation moved the value of {b}"
        );
        for sign in [1i8, -1] {
            let stab = b.markov_move(MarkovMove::Stabilize(sign)).unwrap();
            assert!(
                (jones_value(&stab).value - v).norm() <= 1e-9,
                "stabilization ({sign}) moved the value of {b}"
            );
        }
    }
    println!("criterion 02 (Markov invariance, 100 braids): PASS");
}

#[test]
fn criterion_03_representation_suite() {
    let started = Instant::now();
    // Braid relations and unitarity on every sector up to n = 8.
    for n in 2..=8usize {
        for sec in Sector::ALL {
            if enumerate_sector(n, sec).is_empty() {
                continue;
            }
            let ops: Vec<_> = (1..n)
                .map(|i| crossing_operator(n, i, sec).unwrap().matrix)
                .collect();
            for m in &ops {
                assert!(unitarity_residual(m) <= 1e-12, "unitarity n={n} {sec}");
            }
            for i in 0..ops.len() {
                for j in i + 2..ops.len() {
                    let lhs = fibjones::linalg::mat_mul(&ops[i], &ops[j]);
                    let rhs = fibjones::linalg::mat_mul(&ops[j], &ops[i]);
                    assert!(max_abs_diff(&lhs, &rhs) <= 1e-12, "far commute n={n}");
                }
                if i + 1 < ops.len() {
                    let lhs = fibjones::linalg::mat_mul(
                        &fibjones::linalg::mat_mul(&ops[i], &ops[i + 1]),
                        &ops[i],
                    );
                    let rhs = fibjones::linalg::mat_mul(
                        &fibjones::linalg::mat_mul(&ops[i + 1], &ops[i]),
                        &ops[i + 1],
                    );
                    assert!(max_abs_diff(&lhs, &rhs) <= 1e-12, "yang-baxter n={n}");
                }
            }
        }
        // Temperley-Lieb relations rel1-rel3.
        for (name, residual) in tl_relation_residuals(n).unwrap() {
            assert!(residual <= 1e-12, "{name}: {residual:e}");
        }
    }
    // Block squares.
    for (name, residual) in block_square_residuals() {
        assert!(residual <= 1e-12, "{name}");
    }
    // Markov contraction residual ≤ 1e−9 for words avoiding σ_{n−1}, n ≤ 8.
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    for n in 2..=8usize {
        let id = BraidWord::identity(n).unwrap();
        assert!(markov_contraction_check(&id).unwrap() <= 1e-9);
        for _ in 0..5 {
            if n == 2 {
                break; // only the empty word avoids σ₁ in B₂
            }
            let len = rng.gen_range(1..=6);
            let word: Vec<i32> = (0..len)
                .map(|_| {
                    let i = rng.gen_range(1..n - 1) as i32;
                    if rng.gen_bool(0.5) {
                        i
                    } else {
                        -i
                    }
                })
                .collect();
            let b = BraidWord::new(n, word).unwrap();
            let residual = markov_contraction_check(&b).unwrap();
            assert!(residual <= 1e-9, "contraction n={n} {b}: {residual:e}");
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() <= 30, "runtime {elapsed:?} over budget");
    println!(
        "criterion 03 (representation suite to n=8 in {:.2?}): PASS",
        elapsed
    );
}

#[test]
fn criterion_04_constants() {
    let k = constants();
    assert!((k.phi * k.e + k.a - (k.b + k.phi * k.a)).norm() <= 1e-12);
    assert!((k.delta - (k.big_a - 1.0)).norm() <= 1e-12);
    let d = -(k.big_a.powi(2) + k.big_a.powi(-2));
    assert!((d - Complex64::new(k.phi, 0.0)).norm() <= 1e-12);
    assert!((k.big_d - k.phi).abs() <= 1e-12);
    println!("criterion 04 (constants): PASS");
}

#[test]
fn criterion_05_zeckendorf() {
    // Bijectivity for lengths ≤ 20, split by first symbol.
    for len in 1..=20usize {
        let total = fibonacci(len + 2);
        let threshold = fibonacci(len + 1);
        for z in 0..total {
            let s = zeckendorf_decode(len, z).unwrap();
            assert_eq!(zeckendorf_encode(&s), z);
            let starts_star = s.symbols()[0] == Symbol::Star;
            assert_eq!(starts_star, z >= threshold, "first-symbol split at {len}/{z}");
        }
    }
    // Sector dimension table for n ≤ 16.
    for n in 1..=16usize {
        for sec in Sector::ALL {
            assert_eq!(enumerate_sector(n, sec).len() as u64, sec.dimension(n));
        }
    }
    // Encoding efficiency for string lengths ≤ 32.
    for len in 1..=32usize {
        assert!(encoding_efficiency(len) > 0.5, "length {len}");
    }
    println!("criterion 05 (Zeckendorf bijectivity, dimensions, efficiency): PASS");
}

#[test]
fn criterion_06_compiler_correctness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    for trial in 0..50 {
        let b = random_braid(&mut rng, 2, 5, 6);
        let compiled = compile(&b).unwrap();
        let lhs = compiled.weighted_trace_exact();
        let rhs = weighted_trace(&b);
        assert!(
            (lhs - rhs).norm() <= 1e-9,
            "trial {trial} braid {b}: {lhs} vs {rhs}"
        );
    }
    // Reversible maps are permutations, exhaustively for widths ≤ 12.
    let field = BitField { offset: 0, width: 11 };
    for (name, steps) in [
        (
            "compare-flip",
            vec![PermStep::FlipIfGe {
                field,
                threshold: fibonacci(13),
                bit: 11,
            }],
        ),
        (
            "add-const",
            vec![PermStep::AddConstMod {
                field,
                amount: fibonacci(14),
                control: None,
            }],
        ),
        (
            "leftmost-extract",
            vec![
                PermStep::FlipIfGe {
                    field,
                    threshold: fibonacci(13),
                    bit: 11,
                },
                PermStep::SubConstMod {
                    field,
                    amount: fibonacci(13),
                    control: Some(11),
                },
            ],
        ),
    ] {
        assert!(steps_are_permutation(&steps, 12), "{name}");
    }
    for n in 2..=5usize {
        let layout = Layout::new(n, false);
        assert!(layout.total_bits <= 12, "crossing layout n={n}");
        for k in 0..n.saturating_sub(2) {
            assert!(steps_are_permutation(
                &split_shift_steps(&layout, k, ShiftDir::Right),
                layout.total_bits
            ));
            assert!(steps_are_permutation(
                &split_shift_steps(&layout, k + 1, ShiftDir::Left),
                layout.total_bits
            ));
        }
        for i in 1..n {
            assert!(
                steps_are_permutation(&crossing_permutation_steps(&layout, i), layout.total_bits),
                "crossing permutation n={n} i={i}"
            );
        }
    }
    println!(
        "criterion 06 (compiler trace identity on 50 braids + permutations, {:.2?}): PASS",
        started.elapsed()
    );
}

#[test]
fn criterion_07_dqc1_estimation() {
    let started = Instant::now();
    let braids = [
        parse_braid("B3: 1 2 -1").unwrap(),
        parse_braid("B2: 1 1 1").unwrap(),
    ];
    for b in &braids {
        let single = Instant::now();
        let exact = jones_value(b).value;
        let mut hits = 0usize;
        for seed in 0..100u64 {
            let est = estimate_jones_dqc1(b, 0.05, 0.95, seed).unwrap();
            if (est.jones.value - exact).norm() <= est.radius {
                hits += 1;
            }
        }
        assert!(hits >= 95, "{b}: only {hits}/100 within radius");
        let single = single.elapsed() / 100;
        assert!(single.as_secs() < 60, "single run {single:?}");
        println!("  {b}: {hits}/100 within reported radius, {single:.2?}/run");
    }
    println!(
        "criterion 07 (DQC1 estimation coverage, {:.2?}): PASS",
        started.elapsed()
    );
}

#[test]
fn criterion_08_ancilla_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    // Projector-sandwich factor 1/4, dense, random 2- and 3-qubit unitaries.
    for qubits in [2usize, 3] {
        for _ in 0..3 {
            let u = DenseUnitary::new(qubits, random_unitary(1 << qubits, &mut rng)).unwrap();
            let wrapped = clean_ancilla_wrap(&u, &[0]).unwrap();
            let lhs = projected_trace(&u, &[0]).unwrap();
            let rhs = mat_trace(&wrapped.matrix) / 4.0;
            assert!((lhs - rhs).norm() <= 1e-10, "tracform at {qubits} qubits");
        }
    }
    // CNOT tagging multiplies the clean-block trace by 2^m.
    for m in 1..=3usize {
        let v = random_unitary(4, &mut rng);
        let dim = 1usize << (2 + m);
        let mut c = ndarray::Array2::zeros((dim, dim));
        for high in 0..(1 << m) {
            for r in 0..4 {
                for col in 0..4 {
                    c[((high << 2) | r, (high << 2) | col)] = v[(r, col)];
                }
            }
        }
        let c = DenseUnitary::new(2 + m, c).unwrap();
        let tagged = simulate_clean_ancillas(&c, m).unwrap();
        let expected = mat_trace(&v) * (1 << m) as f64;
        assert!(
            (mat_trace(&tagged.matrix) - expected).norm() <= 1e-10,
            "2^m multiplier at m={m}"
        );
    }
    println!("criterion 08 (tracform 1/4 and 2^m tagging identities): PASS");
}

#[test]
fn criterion_09_decompositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    for m in [8usize, 12] {
        let u = random_unitary(m, &mut rng);
        let two = two_level_decompose(&u).unwrap();
        assert!(max_abs_diff(&two_level_reconstruct(&two, m), &u) <= 1e-8);
        let seven = seven_block_decompose(&u).unwrap();
        assert_eq!(seven.len(), 7);
        for f in &seven {
            assert!(f.support.len() <= m / 2, "support at m={m}");
        }
        assert!(max_abs_diff(&block_factors_product(&seven, m), &u) <= 1e-8);
    }
    // Clean swap pattern and M_gen block extraction on the 7-symbol space.
    let space = FiveBlockSpace::new(7).unwrap();
    let v = random_unitary(space.p_side().len(), &mut rng);
    let w = random_unitary(space.star_side().len(), &mut rng);
    let built = block_constructions(7, &v, &w).unwrap();
    let dim = built.space.dim();
    let mut expected = identity_like(dim);
    for (i, j) in built.space.class_range(3).zip(built.space.class_range(4)) {
        expected[(i, i)] = Complex64::default();
        expected[(j, j)] = Complex64::default();
        expected[(i, j)] = Complex64::new(1.0, 0.0);
        expected[(j, i)] = Complex64::new(1.0, 0.0);
    }
    assert!(max_abs_diff(&built.m_clean, &expected) <= 1e-8, "clean swap");
    for (a, ra) in built.space.p_side().enumerate() {
        for (b, rb) in built.space.p_side().enumerate() {
            assert!((built.m_gen[(ra, rb)] - v[(a, b)]).norm() <= 1e-8);
        }
    }
    for (a, ra) in built.space.star_side().enumerate() {
        for (b, rb) in built.space.star_side().enumerate() {
            assert!((built.m_gen[(ra, rb)] - w[(a, b)]).norm() <= 1e-8);
        }
    }
    assert!(is_unitary(&built.m_gen, 1e-8));
    println!("criterion 09 (two-level, seven-block, clean swap, M_gen): PASS");
}

#[test]
fn criterion_10_density_diagnostics() {
    let report = density_report();
    let pi = std::f64::consts::PI;
    assert!((report.angle_a - 7.0 * pi / 5.0).abs() <= 1e-9);
    assert!((report.angle_b - 7.0 * pi / 5.0).abs() <= 1e-9);
    assert!((report.theta12 - (2.0 - 5.0f64.sqrt()).acos()).abs() <= 1e-9);
    assert!((report.theta12 - 1.8091137886).abs() <= 1e-9);
    assert!((report.r_angle - 2.0 * report.theta12).abs() <= 1e-9);
    assert!(report.exclusion_margin_k30 > 1e-3);
    println!(
        "criterion 10 (density diagnostics, margin {:.4}): PASS",
        report.exclusion_margin_k30
    );
}

#[test]
fn criterion_11_reduction_combinatorics() {
    for c_prime in 1..=2usize {
        let census = preimage_census(c_prime, 1).unwrap();
        let zero = census.counts.get(&vec![0u8]).copied().unwrap_or(0);
        let one = census.counts.get(&vec![1u8]).copied().unwrap_or(0);
        assert!(zero == one && zero > 0, "census c'={c_prime}");
    }
    for c_prime in 1..=3usize {
        let len = 2 * 3 * c_prime;
        let total = fibonacci(len + 2);
        let mut images = std::collections::HashSet::new();
        for z in 0..total {
            let s = zeckendorf_decode(len, z).unwrap();
            let t = inchworm_swap(&s, 0, 1, c_prime).unwrap();
            assert_eq!(
                inchworm_swap(&t, 0, 1, c_prime).unwrap(),
                s,
                "involution c'={c_prime}"
            );
            images.insert(zeckendorf_encode(&t));
        }
        assert_eq!(images.len() as u64, total, "permutation c'={c_prime}");
    }
    println!("criterion 11 (census equality + inchworm involution): PASS");
}

#[test]
fn criterion_12_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_fibjones");
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "jones", "B3: 1 2 -1", "--method", "dqc1", "--seed", "11", "--epsilon", "0.2",
        ],
        vec!["jones", "B2: 1 1 1", "--method", "oracle"],
        vec!["density"],
        vec!["decompose", "--mode", "seven", "--dim", "8", "--seed", "4"],
        vec!["check", "--suite", "constants", "--max-n", "4"],
    ];
    for args in &invocations {
        let run = || {
            let out = std::process::Command::new(bin)
                .args(args)
                .output()
                .expect("binary runs");
            assert!(out.status.success(), "{args:?}: {:?}", out);
            out.stdout
        };
        let first = run();
        let second = run();
        assert_eq!(first, second, "{args:?} not byte-identical");
        serde_json::from_slice::<serde_json::Value>(&first).expect("stdout is one JSON document");
    }
    println!("criterion 12 (byte-identical CLI output): PASS");
}
