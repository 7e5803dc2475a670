//! One-clean-qubit (DQC1) trace estimation.
//!
//! The maximally mixed register is simulated classically: each shot draws a
//! uniform basis state, evaluates the Hadamard-test acceptance probability
//! from one diagonal element of U, and flips a Bernoulli coin. Sample counts
//! come from a Hoeffding bound. The clean-ancilla constructions of the
//! projector sandwich and the CNOT tagging trick are built densely for
//! desk-scale verification.

use crate::error::{Error, Result};
use crate::linalg::mat_mul;
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A unitary presented column-on-demand: `column(x)` is U|x⟩ as a sparse
/// list of (basis index, amplitude) pairs.
pub trait UnitaryOracle {
    fn qubits(&self) -> usize;

    fn column(&self, x: u64) -> Vec<(u64, Complex64)>;

    fn dimension(&self) -> u64 {
        1u64 << self.qubits()
    }

    /// ⟨x|U|x⟩.
    fn diagonal(&self, x: u64) -> Complex64 {
        self.column(x)
            .into_iter()
            .find(|&(i, _)| i == x)
            .map(|(_, amp)| amp)
            .unwrap_or_default()
    }

    /// Exact trace by summing every diagonal element.
    fn trace(&self) -> Complex64 {
        (0..self.dimension()).map(|x| self.diagonal(x)).sum()
    }
}

/// A fully materialized unitary matrix.
#[derive(Debug, Clone)]
pub struct DenseUnitary {
    qubits: usize,
    pub matrix: Array2<Complex64>,
}

impl DenseUnitary {
    pub fn new(qubits: usize, matrix: Array2<Complex64>) -> Result<Self> {
        let dim = 1usize << qubits;
        if matrix.dim() != (dim, dim) {
            return Err(Error::Domain(format!(
                "matrix is {:?}, expected {dim}x{dim}",
                matrix.dim()
            )));
        }
        Ok(DenseUnitary { qubits, matrix })
    }

    pub fn identity(qubits: usize) -> Self {
        DenseUnitary {
            qubits,
            matrix: crate::linalg::identity_like(1 << qubits),
        }
    }

    /// X on one qubit, identity elsewhere.
    pub fn bit_flip(qubits: usize, target: usize) -> Self {
        let dim = 1usize << qubits;
        let mut m = Array2::zeros((dim, dim));
        for x in 0..dim {
            m[(x ^ (1 << target), x)] = Complex64::new(1.0, 0.0);
        }
        DenseUnitary { qubits, matrix: m }
    }
}

impl UnitaryOracle for DenseUnitary {
    fn qubits(&self) -> usize {
        self.qubits
    }

    fn column(&self, x: u64) -> Vec<(u64, Complex64)> {
        let dim = 1usize << self.qubits;
        (0..dim)
            .filter_map(|r| {
                let amp = self.matrix[(r, x as usize)];
                (amp != Complex64::default()).then_some((r as u64, amp))
            })
            .collect()
    }

    fn diagonal(&self, x: u64) -> Complex64 {
        self.matrix[(x as usize, x as usize)]
    }
}

/// Which control preparation the Hadamard test uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    /// Control (|0⟩+|1⟩)/√2: p₀ = (1 + Re⟨x|U|x⟩)/2.
    Real,
    /// Control (|0⟩−i|1⟩)/√2: p₀ = (1 + Im⟨x|U|x⟩)/2.
    Imag,
}

/// Probability of measuring the control in |0⟩ for input basis state x.
pub fn hadamard_test_probability(u: &dyn UnitaryOracle, x: u64, part: Part) -> Result<f64> {
    if x >= u.dimension() {
        return Err(Error::Domain(format!(
            "basis index {x} out of range for {} qubits",
            u.qubits()
        )));
    }
    let d = u.diagonal(x);
    let component = match part {
        Part::Real => d.re,
        Part::Imag => d.im,
    };
    Ok((1.0 + component) / 2.0)
}

/// Smallest N with 2·exp(−2Nε′²) ≤ 1 − confidence, where ε′ = ε/2 is the
/// per-Bernoulli accuracy needed for additive error ε on 2p̂₀ − 1.
pub fn samples_required(epsilon: f64, confidence: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Domain(format!("epsilon {epsilon} not in (0, 1]")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Domain(format!("confidence {confidence} not in (0, 1)")));
    }
    let eps_bernoulli = epsilon / 2.0;
    let n = ((2.0 / (1.0 - confidence)).ln() / (2.0 * eps_bernoulli * eps_bernoulli)).ceil();
    Ok((n as u64).max(1))
}

/// A sampled normalized-trace estimate.
#[derive(Debug, Clone)]
pub struct Dqc1Estimate {
    pub estimate: Complex64,
    /// Shots per part; real and imaginary parts use independent budgets.
    pub samples: u64,
    pub epsilon: f64,
    pub confidence: f64,
    pub seed: u64,
}

/// Estimate Tr(U)/2^b by Hadamard-test sampling against a uniformly random
/// basis state. Deterministic given the seed; the two parts consume
/// independent RNG streams so neither perturbs the other.
pub fn estimate_normalized_trace(
    u: &dyn UnitaryOracle,
    epsilon: f64,
    confidence: f64,
    seed: u64,
) -> Result<Dqc1Estimate> {
    let samples = samples_required(epsilon, confidence)?;
    estimate_normalized_trace_with_samples(u, samples, epsilon, confidence, seed)
}

/// Same estimator with an explicit per-part shot count.
pub fn estimate_normalized_trace_with_samples(
    u: &dyn UnitaryOracle,
    samples: u64,
    epsilon: f64,
    confidence: f64,
    seed: u64,
) -> Result<Dqc1Estimate> {
    if samples == 0 {
        return Err(Error::Domain("sample count must be positive".into()));
    }
    let dim = u.dimension();
    let mut parts = [0.0f64; 2];
    for (stream, part) in [(0u64, Part::Real), (1, Part::Imag)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut zeros = 0u64;
        for _ in 0..samples {
            let x = rng.gen_range(0..dim);
            let p0 = hadamard_test_probability(u, x, part)?.clamp(0.0, 1.0);
            if rng.gen_bool(p0) {
                zeros += 1;
            }
        }
        parts[stream as usize] = 2.0 * (zeros as f64 / samples as f64) - 1.0;
    }
    Ok(Dqc1Estimate {
        estimate: Complex64::new(parts[0], parts[1]),
        samples,
        epsilon,
        confidence,
        seed,
    })
}

fn check_projected(qubits: usize, projected: &[usize]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for &q in projected {
        if q >= qubits {
            return Err(Error::Domain(format!(
                "projected qubit {q} out of range for {qubits} qubits"
            )));
        }
        if !seen.insert(q) {
            return Err(Error::Domain(format!("qubit {q} projected twice")));
        }
    }
    Ok(())
}

fn apply_perm_rows(perm: &dyn Fn(usize) -> usize, m: &Array2<Complex64>) -> Array2<Complex64> {
    let (rows, cols) = m.dim();
    let mut out = Array2::zeros((rows, cols));
    for r in 0..rows {
        let pr = perm(r);
        for c in 0..cols {
            out[(pr, c)] = m[(r, c)];
        }
    }
    out
}

/// The projector-sandwich wrap: two banks of extra qubits and two CNOT
/// layers turn Tr[(P)U(P)U†] into an ordinary trace,
/// Tr[U′] = 4^k · Tr[P U P U†] for k projected qubits.
///
/// Operator order: U′ = C₂ · (U⊗I) · C₁ · (U†⊗I), with C₁ copying each
/// projected qubit into the first bank and C₂ into the second.
pub fn clean_ancilla_wrap(u: &DenseUnitary, projected: &[usize]) -> Result<DenseUnitary> {
    let b = u.qubits();
    check_projected(b, projected)?;
    let k = projected.len();
    let total = b + 2 * k;
    let dim = 1usize << total;
    let low = 1usize << b;

    // U†⊗I and U⊗I on the enlarged space.
    let u_dag = crate::linalg::adjoint(&u.matrix);
    let mut x1 = Array2::zeros((dim, dim));
    let mut u_big = Array2::zeros((dim, dim));
    for high in 0..(1usize << (2 * k)) {
        let off = high << b;
        for r in 0..low {
            for c in 0..low {
                x1[(off + r, off + c)] = u_dag[(r, c)];
                u_big[(off + r, off + c)] = u.matrix[(r, c)];
            }
        }
    }
    let copy_bank = |bank: usize| {
        let projected = projected.to_vec();
        move |x: usize| {
            let mut y = x;
            for (j, &q) in projected.iter().enumerate() {
                if (x >> q) & 1 == 1 {
                    y ^= 1 << (b + bank * projected.len() + j);
                }
            }
            y
        }
    };
    let x2 = apply_perm_rows(&copy_bank(0), &x1);
    let x3 = mat_mul(&u_big, &x2);
    let x4 = apply_perm_rows(&copy_bank(1), &x3);
    DenseUnitary::new(total, x4)
}

/// Direct evaluation of Tr[(P)U(P)U†] with P projecting the given qubits
/// onto |0⟩; the other side of the sandwich identity.
pub fn projected_trace(u: &DenseUnitary, projected: &[usize]) -> Result<Complex64> {
    let b = u.qubits();
    check_projected(b, projected)?;
    let dim = 1usize << b;
    let keep = |x: usize| projected.iter().all(|&q| (x >> q) & 1 == 0);
    let mut sum = Complex64::default();
    for x in 0..dim {
        if !keep(x) {
            continue;
        }
        for y in 0..dim {
            if !keep(y) {
                continue;
            }
            sum += u.matrix[(x, y)] * u.matrix[(x, y)].conj();
        }
    }
    // Tr[P U P U†] = Σ_{x,y ∈ P} U_{xy} (U†)_{yx} = Σ |U_{xy}|².
    Ok(sum)
}

/// The CNOT tagging trick: given a circuit on b+m qubits whose last m
/// qubits are work ancillas, add m extra qubits with CNOTs so that only
/// basis states with clean ancillas contribute:
/// Tr[result] = 2^m · Σ_x ⟨x,0|C|x,0⟩.
pub fn simulate_clean_ancillas(c: &DenseUnitary, m: usize) -> Result<DenseUnitary> {
    let qc = c.qubits();
    if m > qc {
        return Err(Error::Domain(format!(
            "cannot treat {m} of {qc} qubits as ancillas"
        )));
    }
    let b = qc - m;
    let total = qc + m;
    let dim = 1usize << total;
    let mut out = Array2::zeros((dim, dim));
    // result = (C⊗I)·P with P|x⟩ = |x ⊕ extras flipped by ancilla bits⟩:
    // column x of the result is column P(x) of C⊗I.
    for x in 0..dim {
        let mut px = x;
        for j in 0..m {
            if (x >> (b + j)) & 1 == 1 {
                px ^= 1 << (qc + j);
            }
        }
        let (c_col, high) = (px & ((1 << qc) - 1), px >> qc);
        for r in 0..(1usize << qc) {
            let amp = c.matrix[(r, c_col)];
            if amp != Complex64::default() {
                out[((high << qc) | r, x)] = amp;
            }
        }
    }
    DenseUnitary::new(total, out)
}

/// Spot-check column orthonormality on `pairs` random column pairs.
pub fn unitarity_spot_check(u: &dyn UnitaryOracle, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = u.dimension();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let i = rng.gen_range(0..dim);
        let j = rng.gen_range(0..dim);
        let ci: std::collections::HashMap<u64, Complex64> = u.column(i).into_iter().collect();
        let cj = u.column(j);
        let mut dot = Complex64::default();
        for (idx, amp) in cj {
            if let Some(a) = ci.get(&idx) {
                dot += a.conj() * amp;
            }
        }
        let expected = if i == j { 1.0 } else { 0.0 };
        worst = worst.max((dot - expected).norm());
    }
    worst
}
