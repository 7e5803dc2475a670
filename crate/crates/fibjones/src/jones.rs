//! Weighted Markov trace of the Fibonacci representation and the Jones
//! value of a braid's trace closure at t = e^{i2π/5}.

use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::fibrep::{
    constants, crossing_operator, fibonacci, represent, Sector, SymbolString,
};
use crate::linalg::{identity_like, mat_mul};
use ndarray::Array2;
use num_complex::Complex64;

/// The Jones evaluation of one braid's trace closure.
#[derive(Debug, Clone)]
pub struct JonesResult {
    pub braid: BraidWord,
    pub weighted_trace: Complex64,
    pub writhe: i64,
    /// value = (−A)^{3·writhe} · D^{n−1} · weighted_trace.
    pub value: Complex64,
}

/// tr̃(b): the normalized trace over *-prefixed strings, weighted φ on
/// strings ending in p and 1 on strings ending in *.
pub fn weighted_trace(b: &BraidWord) -> Complex64 {
    let k = constants();
    let n = b.strands();
    let tr_sp = represent(b, Sector::StarP).trace();
    let tr_ss = represent(b, Sector::StarStar).trace();
    (k.phi * tr_sp + tr_ss) / (k.phi * fibonacci(n) as f64 + fibonacci(n - 1) as f64)
}

/// Rescale a weighted trace into the Jones value of the trace closure.
pub fn jones_from_trace(b: &BraidWord, trace: Complex64) -> JonesResult {
    let k = constants();
    let w = b.writhe();
    let n = b.strands() as i32;
    let prefactor = (-k.big_a).powi(3 * w as i32) * Complex64::new(k.big_d, 0.0).powi(n - 1);
    JonesResult {
        braid: b.clone(),
        weighted_trace: trace,
        writhe: w,
        value: prefactor * trace,
    }
}

/// Exact Jones value via the Fibonacci representation.
pub fn jones_value(b: &BraidWord) -> JonesResult {
    jones_from_trace(b, weighted_trace(b))
}

/// Êᵢ = A⁻¹ρ(σᵢ) − A⁻²·1 on one sector: the Temperley-Lieb generator image.
pub fn tl_generator_image(n: usize, i: usize, sector: Sector) -> Result<Array2<Complex64>> {
    let k = constants();
    let rho = crossing_operator(n, i, sector)?;
    let dim = rho.dim();
    let mut out = rho.matrix;
    let a1 = k.big_a.powi(-1);
    let a2 = k.big_a.powi(-2);
    for r in 0..dim {
        for c in 0..dim {
            out[(r, c)] *= a1;
        }
        out[(r, r)] -= a2;
    }
    Ok(out)
}

/// Residual of the Markov contraction property: for b ∈ B_n using only
/// σ₁..σ_{n-2}, |tr̃(ρ(b)·ρ(σ_{n−1})) − (1/δ)·tr̃(ρ(b↓))| where b↓ is the
/// same word read in B_{n−1}.
pub fn markov_contraction_check(b: &BraidWord) -> Result<f64> {
    let n = b.strands();
    if n < 2 {
        return Err(Error::Precondition(
            "contraction needs at least two strands".into(),
        ));
    }
    if b.word().iter().any(|&g| g.unsigned_abs() as usize == n - 1) {
        return Err(Error::Precondition(format!(
            "word must avoid the last generator σ{}",
            n - 1
        )));
    }
    let extended = b.compose(&BraidWord::new(n, vec![(n - 1) as i32])?)?;
    let lhs = weighted_trace(&extended);
    let lowered = BraidWord::new(n - 1, b.word().to_vec())?;
    let rhs = weighted_trace(&lowered) / constants().delta;
    Ok((lhs - rhs).norm())
}

/// The weighted trace computed from the p-prefixed sectors instead. The
/// Markov trace axioms are boundary-symbol blind, so this must agree with
/// [`weighted_trace`]; the compiler's full-register normalization relies on it.
pub fn weighted_trace_p_prefixed(b: &BraidWord) -> Complex64 {
    let k = constants();
    let n = b.strands();
    let tr_pp = represent(b, Sector::PP).trace();
    let tr_ps = represent(b, Sector::PStar).trace();
    (k.phi * tr_pp + tr_ps) / (k.phi * fibonacci(n + 1) as f64 + fibonacci(n) as f64)
}

/// Weighted trace evaluated string-by-string on the full four-sector space;
/// an independent route used by tests.
pub fn weighted_trace_by_strings(b: &BraidWord) -> Complex64 {
    let k = constants();
    let n = b.strands();
    let op = crate::fibrep::represent_full(b);
    let mut sum = Complex64::default();
    for (idx, s) in op.basis.strings().iter().enumerate() {
        if s.first() != crate::fibrep::Symbol::Star {
            continue;
        }
        let weight = string_weight(s);
        sum += weight * op.matrix[(idx, idx)];
    }
    sum / (k.phi * fibonacci(n) as f64 + fibonacci(n - 1) as f64)
}

/// W_s: φ if the string ends with p, 1 if it ends with *.
pub fn string_weight(s: &SymbolString) -> f64 {
    match s.last() {
        crate::fibrep::Symbol::P => constants().phi,
        crate::fibrep::Symbol::Star => 1.0,
    }
}

/// max-entry norm of ÊᵢÊᵢ − D·Êᵢ and friends, used by the relation suites.
pub fn tl_relation_residuals(n: usize) -> Result<Vec<(String, f64)>> {
    let k = constants();
    let big_d = Complex64::new(k.big_d, 0.0);
    let mut out = Vec::new();
    for sector in Sector::ALL {
        let dim = sector.dimension(n);
        if dim == 0 {
            continue;
        }
        let es: Vec<Array2<Complex64>> = (1..n)
            .map(|i| tl_generator_image(n, i, sector))
            .collect::<Result<_>>()?;
        for i in 0..es.len() {
            // rel3: Eᵢ² = D Eᵢ
            let sq = mat_mul(&es[i], &es[i]);
            let scaled = es[i].mapv(|z| z * big_d);
            out.push((
                format!("rel3 n={n} i={} {sector}", i + 1),
                crate::linalg::max_abs_diff(&sq, &scaled),
            ));
            // rel2: Eᵢ Eᵢ₊₁ Eᵢ = Eᵢ
            if i + 1 < es.len() {
                let prod = mat_mul(&mat_mul(&es[i], &es[i + 1]), &es[i]);
                out.push((
                    format!("rel2 n={n} i={} {sector}", i + 1),
                    crate::linalg::max_abs_diff(&prod, &es[i]),
                ));
                let prod = mat_mul(&mat_mul(&es[i + 1], &es[i]), &es[i + 1]);
                out.push((
                    format!("rel2' n={n} i={} {sector}", i + 1),
                    crate::linalg::max_abs_diff(&prod, &es[i + 1]),
                ));
            }
            // rel1: far generators commute
            for j in (i + 2)..es.len() {
                let lhs = mat_mul(&es[i], &es[j]);
                let rhs = mat_mul(&es[j], &es[i]);
                out.push((
                    format!("rel1 n={n} i={} j={} {sector}", i + 1, j + 1),
                    crate::linalg::max_abs_diff(&lhs, &rhs),
                ));
            }
        }
    }
    Ok(out)
}

/// The three block-square identities of the TL generators: each 1×1 or 2×2
/// block of A⁻¹ρ(σᵢ) − A⁻² squares to D times itself.
pub fn block_square_residuals() -> Vec<(String, f64)> {
    let k = constants();
    let a1 = k.big_a.powi(-1);
    let a2 = k.big_a.powi(-2);
    let d = k.big_d;
    let mut out = Vec::new();
    for (name, block) in [("a", k.a), ("b", k.b)] {
        let x = a1 * block - a2;
        out.push((format!("block {name}"), (x * x - d * x).norm()));
    }
    let mut m = Array2::<Complex64>::zeros((2, 2));
    m[(0, 0)] = a1 * k.c - a2;
    m[(0, 1)] = a1 * k.d;
    m[(1, 0)] = a1 * k.d;
    m[(1, 1)] = a1 * k.e - a2;
    let sq = mat_mul(&m, &m);
    let scaled = m.mapv(|z| z * Complex64::new(d, 0.0));
    out.push((
        "block cd/de".into(),
        crate::linalg::max_abs_diff(&sq, &scaled),
    ));
    let _ = identity_like(2);
    out
}
