//! Hardness-direction building blocks: the superblock bit encoding, the
//! inchworm segment swap, SU(2)/SO(3) density diagnostics for the two
//! generator images, and the unitary decompositions used to assemble
//! arbitrary block unitaries from operators of limited support.

use crate::error::{Error, Result};
use crate::fibrep::{constants, fibonacci, zeckendorf_decode, Symbol, SymbolString};
use crate::linalg::{identity_like, mat_mul, max_abs_diff};
use ndarray::Array2;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// Superblock codec
// ---------------------------------------------------------------------------

/// What a superblock encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperblockBit {
    Zero,
    One,
    Noncoding,
}

/// Fixed-size groups of 3-symbol blocks encoding one logical bit each:
/// scanning left to right, the first `ppp` block means 0 and the first
/// `p*p` block means 1.
#[derive(Debug, Clone, Copy)]
pub struct SuperblockCodec {
    pub blocks_per_superblock: usize,
}

impl SuperblockCodec {
    pub fn new(blocks_per_superblock: usize) -> Result<Self> {
        if blocks_per_superblock == 0 {
            return Err(Error::Domain("need at least one block per superblock".into()));
        }
        Ok(SuperblockCodec {
            blocks_per_superblock,
        })
    }

    /// Symbols per superblock.
    pub fn width(&self) -> usize {
        3 * self.blocks_per_superblock
    }

    pub fn decode(&self, segment: &[Symbol]) -> Result<SuperblockBit> {
        if segment.len() != self.width() {
            return Err(Error::Domain(format!(
                "segment has {} symbols, superblock width is {}",
                segment.len(),
                self.width()
            )));
        }
        for block in segment.chunks_exact(3) {
            match block {
                [Symbol::P, Symbol::P, Symbol::P] => return Ok(SuperblockBit::Zero),
                [Symbol::P, Symbol::Star, Symbol::P] => return Ok(SuperblockBit::One),
                _ => {}
            }
        }
        Ok(SuperblockBit::Noncoding)
    }
}

/// Decode one superblock segment with `c_prime` blocks of three.
pub fn superblock_decode(segment: &[Symbol], c_prime: usize) -> Result<SuperblockBit> {
    SuperblockCodec::new(c_prime)?.decode(segment)
}

/// Preimage tallies of the superblock encoding over all legal strings.
#[derive(Debug, Clone)]
pub struct Census {
    /// Count of legal strings per fully-coding bitstring.
    pub counts: BTreeMap<Vec<u8>, u64>,
    /// Strings with at least one noncoding superblock.
    pub noncoding: u64,
    pub total: u64,
}

impl Census {
    pub fn noncoding_fraction(&self) -> f64 {
        self.noncoding as f64 / self.total as f64
    }
}

/// Enumerate every legal string of `superblocks` superblocks and tally the
/// preimage size of each bitstring.
pub fn preimage_census(c_prime: usize, superblocks: usize) -> Result<Census> {
    let codec = SuperblockCodec::new(c_prime)?;
    let len = codec.width() * superblocks;
    if len > 21 {
        return Err(Error::SizeCap(format!(
            "{len} symbols is beyond the exhaustive census cap of 21"
        )));
    }
    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    let mut noncoding = 0u64;
    let total = fibonacci(len + 2);
    for z in 0..total {
        let s = zeckendorf_decode(len, z).expect("in range");
        let mut bits = Vec::with_capacity(superblocks);
        let mut bad = false;
        for seg in s.symbols().chunks_exact(codec.width()) {
            match codec.decode(seg)? {
                SuperblockBit::Zero => bits.push(0u8),
                SuperblockBit::One => bits.push(1u8),
                SuperblockBit::Noncoding => {
                    bad = true;
                    break;
                }
            }
        }
        if bad {
            noncoding += 1;
        } else {
            *counts.entry(bits).or_insert(0) += 1;
        }
    }
    Ok(Census {
        counts,
        noncoding,
        total,
    })
}

// ---------------------------------------------------------------------------
// Inchworm swap
// ---------------------------------------------------------------------------

/// Swap the smallest center-fitting segments of two adjacent superblocks.
///
/// The segment (a common offset window around the superblock center) is the
/// smallest one bordered by `p` on both sides in both superblocks; if none
/// exists the operation is the identity. Because the swap only exchanges
/// symbols inside the window, every candidate window's validity is preserved,
/// which makes the operation an involution.
pub fn inchworm_swap(
    s: &SymbolString,
    current: usize,
    target: usize,
    c_prime: usize,
) -> Result<SymbolString> {
    let codec = SuperblockCodec::new(c_prime)?;
    let width = codec.width();
    if s.len() % width != 0 {
        return Err(Error::Domain(format!(
            "string length {} is not a multiple of the superblock width {width}",
            s.len()
        )));
    }
    let count = s.len() / width;
    if current >= count || target >= count {
        return Err(Error::Domain("superblock index out of range".into()));
    }
    if current.abs_diff(target) != 1 {
        return Err(Error::Precondition(
            "target superblock must be adjacent to the current one".into(),
        ));
    }
    let center = (width - 1) / 2;
    let symbols = s.symbols();
    let block = |sb: usize, offset: usize| symbols[sb * width + offset];

    let mut chosen: Option<(usize, usize)> = None;
    'outer: for size in 1..=width.saturating_sub(2) {
        let lo_min = center.saturating_sub(size - 1).max(1);
        let lo_max = center.min(width - 1 - size);
        let mut lo = lo_max;
        loop {
            if lo < lo_min {
                break;
            }
            let hi = lo + size - 1;
            if hi >= center && hi + 1 <= width - 1 {
                let ok = [current, target].iter().all(|&sb| {
                    block(sb, lo - 1) == Symbol::P && block(sb, hi + 1) == Symbol::P
                });
                if ok {
                    chosen = Some((lo, hi));
                    break 'outer;
                }
            }
            if lo == 0 {
                break;
            }
            lo -= 1;
        }
    }

    let Some((lo, hi)) = chosen else {
        return Ok(s.clone());
    };
    let mut out = symbols.to_vec();
    for offset in lo..=hi {
        out.swap(current * width + offset, target * width + offset);
    }
    SymbolString::new(out)
}

// ---------------------------------------------------------------------------
// SU(2) → SO(3) diagnostics
// ---------------------------------------------------------------------------

/// Axis-angle form of an SO(3) rotation.
#[derive(Debug, Clone, Copy)]
pub struct RotationDescriptor {
    pub axis: [f64; 3],
    /// In [0, 2π), as carried by the SU(2) representative.
    pub angle: f64,
}

fn check_su2(u: &Array2<Complex64>) -> Result<()> {
    if u.dim() != (2, 2) {
        return Err(Error::Domain("expected a 2x2 matrix".into()));
    }
    let residual = crate::linalg::unitarity_residual(u);
    if residual > 1e-10 {
        return Err(Error::NotUnitary { residual });
    }
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    if (det - 1.0).norm() > 1e-10 {
        return Err(Error::Domain(format!("determinant {det} is not 1")));
    }
    Ok(())
}

/// Decompose u = cos(θ/2)·1 + i·sin(θ/2)(xσx + yσy + zσz).
pub fn su2_to_so3(u: &Array2<Complex64>) -> Result<RotationDescriptor> {
    check_su2(u)?;
    let (c, v) = su2_parts(u);
    let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let angle = 2.0 * s.atan2(c);
    let axis = if s > 1e-12 {
        [v[0] / s, v[1] / s, v[2] / s]
    } else {
        [0.0, 0.0, 1.0]
    };
    Ok(RotationDescriptor {
        axis,
        angle: angle.rem_euclid(2.0 * PI),
    })
}

/// (cos(θ/2), sin(θ/2)·axis) without normalization.
fn su2_parts(u: &Array2<Complex64>) -> (f64, [f64; 3]) {
    let c = (u[(0, 0)] + u[(1, 1)]).re / 2.0;
    let sx = (u[(0, 1)] + u[(1, 0)]).im / 2.0;
    let sy = (u[(0, 1)] - u[(1, 0)]).re / 2.0;
    let sz = (u[(0, 0)] - u[(1, 1)]).im / 2.0;
    (c, [sx, sy, sz])
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = dot(v, v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn so3_from_su2(u: &Array2<Complex64>) -> [[f64; 3]; 3] {
    let paulis = pauli_matrices();
    let ud = crate::linalg::adjoint(u);
    let mut r = [[0.0; 3]; 3];
    for (i, si) in paulis.iter().enumerate() {
        for (j, sj) in paulis.iter().enumerate() {
            let m = mat_mul(si, &mat_mul(u, &mat_mul(sj, &ud)));
            r[i][j] = crate::linalg::mat_trace(&m).re / 2.0;
        }
    }
    r
}

fn pauli_matrices() -> [Array2<Complex64>; 3] {
    let i = Complex64::i();
    let mut sx = Array2::zeros((2, 2));
    sx[(0, 1)] = Complex64::new(1.0, 0.0);
    sx[(1, 0)] = Complex64::new(1.0, 0.0);
    let mut sy = Array2::zeros((2, 2));
    sy[(0, 1)] = -i;
    sy[(1, 0)] = i;
    let mut sz = Array2::zeros((2, 2));
    sz[(0, 0)] = Complex64::new(1.0, 0.0);
    sz[(1, 1)] = Complex64::new(-1.0, 0.0);
    [sx, sy, sz]
}

fn so3_apply(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
        r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
        r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2],
    ]
}

fn so3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn so3_transpose(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

fn so3_axis_angle(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let n = normalize(axis);
    let (s, c) = angle.sin_cos();
    let omc = 1.0 - c;
    let (x, y, z) = (n[0], n[1], n[2]);
    [
        [c + x * x * omc, x * y * omc - z * s, x * z * omc + y * s],
        [y * x * omc + z * s, c + y * y * omc, y * z * omc - x * s],
        [z * x * omc - y * s, z * y * omc + x * s, c + z * z * omc],
    ]
}

/// Normalized generator images A' = diag(b,a)/√(ab) and B' = [[c,d],[d,e]]/√(ce−d²).
pub fn normalized_generators() -> (Array2<Complex64>, Array2<Complex64>) {
    let k = constants();
    let mut ga = Array2::zeros((2, 2));
    ga[(0, 0)] = k.b;
    ga[(1, 1)] = k.a;
    let det_a = (k.a * k.b).sqrt();
    let ga = ga.mapv(|z| z / det_a);
    let mut gb = Array2::zeros((2, 2));
    gb[(0, 0)] = k.c;
    gb[(0, 1)] = k.d;
    gb[(1, 0)] = k.d;
    gb[(1, 1)] = k.e;
    let det_b = (k.c * k.e - k.d * k.d).sqrt();
    let gb = gb.mapv(|z| z / det_b);
    (ga, gb)
}

/// Density diagnostics for the two-generator subgroup of SU(2).
#[derive(Debug, Clone, serde::Serialize)]
pub struct DensityReport {
    pub angle_a: f64,
    pub angle_b: f64,
    pub axis_a: [f64; 3],
    pub axis_b: [f64; 3],
    /// Axis separation θ₁₂ = arccos(2−√5).
    pub theta12: f64,
    /// Rotation angle of R = φ(A')⁵φ(B')⁵ about the oriented axis, = 2θ₁₂.
    pub r_angle: f64,
    /// Smallest |2θ₁₂ − 2πj/k| over k ≤ 5.
    pub exclusion_margin_k5: f64,
    /// Smallest |2θ₁₂ − 2πj/k| over k ≤ 30.
    pub exclusion_margin_k30: f64,
    /// Separation of the conjugated Euler axis from the diagonal axis,
    /// 2(2θ₁₂ − π).
    pub q_axis_separation: f64,
}

fn exclusion_margin(angle: f64, max_k: u32) -> f64 {
    let mut best = f64::INFINITY;
    for k in 1..=max_k {
        for j in 0..=k {
            best = best.min((angle - 2.0 * PI * j as f64 / k as f64).abs());
        }
    }
    best
}

/// Pure function of the representation constants; no randomness anywhere.
pub fn density_report() -> DensityReport {
    let (ga, gb) = normalized_generators();
    let ra = su2_to_so3(&ga).expect("generator A' is special unitary");
    let rb = su2_to_so3(&gb).expect("generator B' is special unitary");
    let theta12 = dot(ra.axis, rb.axis).clamp(-1.0, 1.0).acos();

    // R = A'^5 B'^5; measure its angle about the axis oriented along
    // axis_a × axis_b, which reproduces 2θ₁₂ rather than 2π − 2θ₁₂.
    let pow5 = |m: &Array2<Complex64>| {
        let mut out = identity_like(2);
        for _ in 0..5 {
            out = mat_mul(&out, m);
        }
        out
    };
    let r = mat_mul(&pow5(&ga), &pow5(&gb));
    let (c, v) = su2_parts(&r);
    let oriented = normalize(cross(ra.axis, rb.axis));
    let r_angle = (2.0 * dot(v, oriented).atan2(c)).rem_euclid(2.0 * PI);

    // Axis of Q(α) = R(π)·φ(B_diag(α))·R(π) in the Euler construction.
    let rpi = so3_mul(
        &so3_mul(&so3_axis_angle(rb.axis, PI), &so3_axis_angle([0.0, 0.0, 1.0], PI)),
        &so3_axis_angle(rb.axis, PI),
    );
    let q_axis = so3_apply(&rpi, [0.0, 0.0, 1.0]);
    let q_axis_separation = dot(q_axis, [0.0, 0.0, 1.0]).clamp(-1.0, 1.0).acos();

    DensityReport {
        angle_a: ra.angle,
        angle_b: rb.angle,
        axis_a: ra.axis,
        axis_b: rb.axis,
        theta12,
        r_angle,
        exclusion_margin_k5: exclusion_margin(2.0 * theta12, 5),
        exclusion_margin_k30: exclusion_margin(2.0 * theta12, 30),
        q_axis_separation,
    }
}

// ---------------------------------------------------------------------------
// Two-level decomposition
// ---------------------------------------------------------------------------

/// A unitary acting on two basis states (i < j), identity elsewhere.
#[derive(Debug, Clone)]
pub struct TwoLevelUnitary {
    pub i: usize,
    pub j: usize,
    pub matrix: [[Complex64; 2]; 2],
}

impl TwoLevelUnitary {
    pub fn embed(&self, dim: usize) -> Array2<Complex64> {
        let mut m = identity_like(dim);
        m[(self.i, self.i)] = self.matrix[0][0];
        m[(self.i, self.j)] = self.matrix[0][1];
        m[(self.j, self.i)] = self.matrix[1][0];
        m[(self.j, self.j)] = self.matrix[1][1];
        m
    }

    fn adjoint(&self) -> TwoLevelUnitary {
        TwoLevelUnitary {
            i: self.i,
            j: self.j,
            matrix: [
                [self.matrix[0][0].conj(), self.matrix[1][0].conj()],
                [self.matrix[0][1].conj(), self.matrix[1][1].conj()],
            ],
        }
    }

    /// Left-multiply a dense matrix by this two-level unitary in place.
    fn apply_left(&self, m: &mut Array2<Complex64>) {
        let cols = m.dim().1;
        for c in 0..cols {
            let x = m[(self.i, c)];
            let y = m[(self.j, c)];
            m[(self.i, c)] = self.matrix[0][0] * x + self.matrix[0][1] * y;
            m[(self.j, c)] = self.matrix[1][0] * x + self.matrix[1][1] * y;
        }
    }
}

/// Elimination row operation on rows (i, j) for column entries (x, y):
/// [[x*, y*], [y, −x]]/√(|x|²+|y|²) sends (x, y) to (√(|x|²+|y|²), 0).
fn row_op(i: usize, j: usize, x: Complex64, y: Complex64) -> TwoLevelUnitary {
    let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
    TwoLevelUnitary {
        i,
        j,
        matrix: [
            [x.conj() / norm, y.conj() / norm],
            [y / norm, -x / norm],
        ],
    }
}

/// Decompose a unitary into two-level factors whose product reconstructs it.
///
/// Gaussian elimination with the row operation above; the lone residual
/// diagonal phase (a determinant leftover the det = −1 row operations cannot
/// absorb) is returned as one final diagonal two-level factor.
pub fn two_level_decompose(u: &Array2<Complex64>) -> Result<Vec<TwoLevelUnitary>> {
    let dim = u.dim().0;
    if !crate::linalg::is_unitary(u, 1e-10) {
        return Err(Error::NotUnitary {
            residual: crate::linalg::unitarity_residual(u),
        });
    }
    if dim == 1 {
        return Ok(Vec::new());
    }
    let mut m = u.clone();
    let mut ops: Vec<TwoLevelUnitary> = Vec::new();
    for col in 0..dim {
        for row in col + 1..dim {
            let y = m[(row, col)];
            if y.norm() <= 1e-14 {
                continue;
            }
            let op = row_op(col, row, m[(col, col)], y);
            op.apply_left(&mut m);
            ops.push(op);
        }
        // Make the pivot exactly 1 while another row remains to absorb −x.
        let x = m[(col, col)];
        if col + 1 < dim && (x - 1.0).norm() > 1e-14 {
            let op = row_op(col, col + 1, x, Complex64::default());
            op.apply_left(&mut m);
            ops.push(op);
        }
    }
    let last = m[(dim - 1, dim - 1)];
    if (last - 1.0).norm() > 1e-14 {
        let op = TwoLevelUnitary {
            i: dim - 2,
            j: dim - 1,
            matrix: [
                [Complex64::new(1.0, 0.0), Complex64::default()],
                [Complex64::default(), last.conj()],
            ],
        };
        op.apply_left(&mut m);
        ops.push(op);
    }
    debug_assert!(max_abs_diff(&m, &identity_like(dim)) < 1e-8);
    Ok(ops.iter().map(TwoLevelUnitary::adjoint).collect())
}

/// Multiply two-level factors back together (in the returned product order).
pub fn two_level_reconstruct(factors: &[TwoLevelUnitary], dim: usize) -> Array2<Complex64> {
    let mut out = identity_like(dim);
    for f in factors.iter().rev() {
        f.apply_left(&mut out);
    }
    out
}

// ---------------------------------------------------------------------------
// Seven-block decomposition
// ---------------------------------------------------------------------------

/// A unitary supported on an explicit set of basis states.
#[derive(Debug, Clone)]
pub struct BlockFactor {
    pub support: Vec<usize>,
    /// Dense matrix over `support`, in support order.
    pub matrix: Array2<Complex64>,
}

impl BlockFactor {
    pub fn embed(&self, dim: usize) -> Array2<Complex64> {
        let mut m = identity_like(dim);
        for (a, &ra) in self.support.iter().enumerate() {
            for (b, &rb) in self.support.iter().enumerate() {
                m[(ra, rb)] = self.matrix[(a, b)];
            }
            m[(ra, ra)] = self.matrix[(a, a)];
        }
        m
    }

}

struct StepAccumulator {
    support: Vec<usize>,
    op: Array2<Complex64>,
}

impl StepAccumulator {
    fn new(dim: usize, support: Vec<usize>) -> Self {
        StepAccumulator {
            support,
            op: identity_like(dim),
        }
    }

    fn eliminate(&mut self, m: &mut Array2<Complex64>, pivot: usize, target: usize, col: usize) {
        debug_assert!(self.support.contains(&pivot) && self.support.contains(&target));
        let y = m[(target, col)];
        if y.norm() <= 1e-14 {
            return;
        }
        let op = row_op(pivot, target, m[(pivot, col)], y);
        op.apply_left(m);
        op.apply_left(&mut self.op);
    }

    fn apply_block_inverse(&mut self, m: &mut Array2<Complex64>, rows: std::ops::Range<usize>) {
        // Left-multiply both m and the step operator by the inverse of m's
        // current diagonal block on `rows`.
        let k = rows.len();
        let mut block = Array2::zeros((k, k));
        for (a, ra) in rows.clone().enumerate() {
            for (b, rb) in rows.clone().enumerate() {
                block[(a, b)] = m[(ra, rb)];
            }
        }
        let inv = crate::linalg::adjoint(&block);
        let dim = m.dim().1;
        let mut scratch = vec![Complex64::default(); k];
        for target in [&mut *m, &mut self.op] {
            for c in 0..dim {
                for (a, _) in rows.clone().enumerate() {
                    scratch[a] = (0..k)
                        .map(|b| inv[(a, b)] * target[(rows.start + b, c)])
                        .sum();
                }
                for (a, ra) in rows.clone().enumerate() {
                    target[(ra, c)] = scratch[a];
                }
            }
        }
    }

    fn into_factor(self) -> BlockFactor {
        let mut matrix = Array2::zeros((self.support.len(), self.support.len()));
        for (a, &ra) in self.support.iter().enumerate() {
            for (b, &rb) in self.support.iter().enumerate() {
                matrix[(a, b)] = self.op[(ra, rb)];
            }
        }
        BlockFactor {
            support: self.support,
            matrix,
        }
    }
}

/// Decompose an m×m unitary (4 | m) into seven factors, each supported on
/// m/2 basis states: upper-triangularization of the top-left quadrant, four
/// quarter-block clearing steps, then the two diagonal-block inversions.
pub fn seven_block_decompose(u: &Array2<Complex64>) -> Result<Vec<BlockFactor>> {
    let m = u.dim().0;
    if m % 4 != 0 || m == 0 {
        return Err(Error::Domain(format!("dimension {m} is not divisible by 4")));
    }
    if !crate::linalg::is_unitary(u, 1e-10) {
        return Err(Error::NotUnitary {
            residual: crate::linalg::unitarity_residual(u),
        });
    }
    let q = m / 4;
    let mut work = u.clone();
    let mut steps: Vec<StepAccumulator> = Vec::with_capacity(7);

    // Step 1: top half; make the upper-left quadrant upper triangular.
    let mut s1 = StepAccumulator::new(m, (0..2 * q).collect());
    for col in 0..2 * q {
        for row in col + 1..2 * q {
            s1.eliminate(&mut work, col, row, col);
        }
    }
    steps.push(s1);

    // Steps 2-5: clear the four lower quarter-blocks of the left half.
    for (pivot_range, target_range) in [
        (0..q, 2 * q..3 * q),
        (0..q, 3 * q..4 * q),
        (q..2 * q, 2 * q..3 * q),
        (q..2 * q, 3 * q..4 * q),
    ] {
        let support: Vec<usize> = pivot_range.clone().chain(target_range.clone()).collect();
        let mut s = StepAccumulator::new(m, support);
        for col in pivot_range {
            for row in target_range.clone() {
                s.eliminate(&mut work, col, row, col);
            }
        }
        steps.push(s);
    }

    // By unitarity the matrix is now diag ⊕ unitary; invert each half.
    let mut s6 = StepAccumulator::new(m, (0..2 * q).collect());
    s6.apply_block_inverse(&mut work, 0..2 * q);
    steps.push(s6);
    let mut s7 = StepAccumulator::new(m, (2 * q..4 * q).collect());
    s7.apply_block_inverse(&mut work, 2 * q..4 * q);
    steps.push(s7);

    debug_assert!(max_abs_diff(&work, &identity_like(m)) < 1e-8);

    // u = S₁†S₂†…S₇†: return the adjoints in product order.
    Ok(steps
        .into_iter()
        .map(|s| {
            let f = s.into_factor();
            BlockFactor {
                support: f.support,
                matrix: crate::linalg::adjoint(&f.matrix),
            }
        })
        .collect())
}

/// Multiply block factors together in product order.
pub fn block_factors_product(factors: &[BlockFactor], dim: usize) -> Array2<Complex64> {
    let mut out = identity_like(dim);
    for f in factors {
        out = mat_mul(&out, &f.embed(dim));
    }
    out
}

// ---------------------------------------------------------------------------
// Block constructions on the five-class string space
// ---------------------------------------------------------------------------

/// The five classes of *-prefixed strings by their last three symbols, in
/// the order used for the last-crossing matrix M_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailClass {
    StarPStar,
    PPStar,
    StarPP,
    PPP,
    PStarP,
}

impl TailClass {
    pub const ALL: [TailClass; 5] = [
        TailClass::StarPStar,
        TailClass::PPStar,
        TailClass::StarPP,
        TailClass::PPP,
        TailClass::PStarP,
    ];

    fn tail(self) -> [Symbol; 3] {
        use Symbol::{P, Star};
        match self {
            TailClass::StarPStar => [Star, P, Star],
            TailClass::PPStar => [P, P, Star],
            TailClass::StarPP => [Star, P, P],
            TailClass::PPP => [P, P, P],
            TailClass::PStarP => [P, Star, P],
        }
    }

    /// The prefix before the tail must end with p.
    fn needs_p_before(self) -> bool {
        matches!(self, TailClass::StarPStar | TailClass::StarPP)
    }
}

/// The *-prefixed strings of a given length, grouped into the five tail
/// classes, each class ordered by its prefix's Zeckendorf value so that the
/// `ppp` and `p*p` classes pair up entry for entry.
#[derive(Debug, Clone)]
pub struct FiveBlockSpace {
    pub string_len: usize,
    pub class_dims: [usize; 5],
    pub basis: Vec<SymbolString>,
}

impl FiveBlockSpace {
    pub fn new(string_len: usize) -> Result<FiveBlockSpace> {
        if string_len < 5 {
            return Err(Error::Domain(
                "five-block space needs at least 5 symbols".into(),
            ));
        }
        let prefix_len = string_len - 3;
        // Prefixes starting with *, Zeckendorf-ordered.
        let mut any_end: Vec<SymbolString> = Vec::new();
        for z in 0..fibonacci(prefix_len + 2) {
            let s = zeckendorf_decode(prefix_len, z).expect("in range");
            if s.first() == Symbol::Star {
                any_end.push(s);
            }
        }
        let mut basis = Vec::new();
        let mut class_dims = [0usize; 5];
        for (ci, class) in TailClass::ALL.iter().enumerate() {
            for prefix in &any_end {
                if class.needs_p_before() && prefix.last() != Symbol::P {
                    continue;
                }
                let mut symbols = prefix.symbols().to_vec();
                symbols.extend_from_slice(&class.tail());
                basis.push(SymbolString::new(symbols)?);
                class_dims[ci] += 1;
            }
        }
        Ok(FiveBlockSpace {
            string_len,
            class_dims,
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn class_range(&self, class: usize) -> std::ops::Range<usize> {
        let start: usize = self.class_dims[..class].iter().sum();
        start..start + self.class_dims[class]
    }

    /// Rows for the last-symbol-* part (classes 1 and 2), dimension f_{L−2}.
    pub fn star_side(&self) -> std::ops::Range<usize> {
        0..self.class_dims[0] + self.class_dims[1]
    }

    /// Rows for the last-symbol-p part (classes 3, 4, 5), dimension f_{L−1}.
    pub fn p_side(&self) -> std::ops::Range<usize> {
        self.class_dims[0] + self.class_dims[1]..self.dim()
    }
}

/// All the matrices of the block construction.
pub struct BlockConstruction {
    pub space: FiveBlockSpace,
    /// Last-crossing matrix: diag(b, a, a) ⊕ [[e,d],[d,c]] over the classes.
    pub m_n: Array2<Complex64>,
    /// Product of M_diag/M_n factors whose lower block is the exact swap.
    pub m_swap: Array2<Complex64>,
    pub m_unphase: Array2<Complex64>,
    /// M_unphase · M_swap: identity on the first three classes, swap of the
    /// ppp and p*p classes.
    pub m_clean: Array2<Complex64>,
    /// Independent (V, W) on the p-side / *-side of the space.
    pub m_gen: Array2<Complex64>,
    pub swap_factor_count: usize,
}

fn m_diag(space: &FiveBlockSpace, alpha: f64) -> Array2<Complex64> {
    let mut m = Array2::zeros((space.dim(), space.dim()));
    let up = Complex64::from_polar(1.0, alpha / 2.0);
    let down = Complex64::from_polar(1.0, -alpha / 2.0);
    for class in 0..5 {
        let phase = if class == 4 { down } else { up };
        for i in space.class_range(class) {
            m[(i, i)] = phase;
        }
    }
    m
}

fn m_crossing(space: &FiveBlockSpace) -> Array2<Complex64> {
    let k = constants();
    let mut m = Array2::zeros((space.dim(), space.dim()));
    for (class, coeff) in [(0usize, k.b), (1, k.a), (2, k.a)] {
        for i in space.class_range(class) {
            m[(i, i)] = coeff;
        }
    }
    let ppp = space.class_range(3);
    let pstarp = space.class_range(4);
    debug_assert_eq!(ppp.len(), pstarp.len());
    for (i, j) in ppp.clone().zip(pstarp.clone()) {
        m[(i, i)] = k.e;
        m[(j, j)] = k.c;
        m[(i, j)] = k.d;
        m[(j, i)] = k.d;
    }
    m
}

/// One factor of the swap word at the two-level (2×2) scale.
#[derive(Debug, Clone, Copy)]
enum SwapFactor {
    Diag(f64),
    Crossing,
}

fn factor_su2(f: SwapFactor) -> Array2<Complex64> {
    match f {
        SwapFactor::Diag(alpha) => {
            let mut m = Array2::zeros((2, 2));
            m[(0, 0)] = Complex64::from_polar(1.0, alpha / 2.0);
            m[(1, 1)] = Complex64::from_polar(1.0, -alpha / 2.0);
            m
        }
        SwapFactor::Crossing => {
            let k = constants();
            let mut m = Array2::zeros((2, 2));
            m[(0, 0)] = k.e;
            m[(0, 1)] = k.d;
            m[(1, 0)] = k.d;
            m[(1, 1)] = k.c;
            m
        }
    }
}

fn word_product_2x2(word: &[SwapFactor]) -> Array2<Complex64> {
    let mut out = identity_like(2);
    for &f in word {
        out = mat_mul(&out, &factor_su2(f));
    }
    out
}

fn word_so3(word: &[SwapFactor]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut acc = out;
    for &f in word {
        let u = factor_su2(f);
        let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
        let su = u.mapv(|z| z / det.sqrt());
        acc = so3_mul(&acc, &so3_from_su2(&su));
    }
    acc
}

/// ZXZ Euler angles of a rotation expressed in an orthonormal frame.
fn euler_zxz(t: &[[f64; 3]; 3]) -> (f64, f64, f64) {
    let beta = t[2][2].clamp(-1.0, 1.0).acos();
    if beta.sin().abs() > 1e-9 {
        let alpha = t[2][0].atan2(t[2][1]);
        let gamma = t[0][2].atan2(-t[1][2]);
        (gamma, beta, alpha)
    } else if t[2][2] > 0.0 {
        (t[1][0].atan2(t[0][0]), 0.0, 0.0)
    } else {
        (t[1][0].atan2(t[0][0]), PI, 0.0)
    }
}

/// Build a word in {B_diag(α), B_n} whose 2×2 product is exactly the swap
/// [[0,1],[1,0]], following the Euler construction: π-rotations R(α) built
/// from B_n⁵, a conjugated perpendicular axis found by root finding, and a
/// final B_n⁵ supplying the determinant −1.
///
/// The SO(3) image of a word is its adjoint action, which carries
/// cos(θ/2) + i·sin(θ/2)(σ·n) to the rotation by −θ about n; realized word
/// angles are therefore the negatives of the solved Euler angles. π
/// rotations are insensitive to that orientation choice.
fn swap_word() -> Result<Vec<SwapFactor>> {
    // Axis line of the crossing factor [[e,d],[d,c]] (not the generator B'
    // of the density diagnostics, whose basis order differs).
    let bn_raw = factor_su2(SwapFactor::Crossing);
    let det = bn_raw[(0, 0)] * bn_raw[(1, 1)] - bn_raw[(0, 1)] * bn_raw[(1, 0)];
    let bn_su = bn_raw.mapv(|z| z / det.sqrt());
    let n_b = su2_to_so3(&bn_su)?.axis;

    let r_word = |alpha: f64| -> Vec<SwapFactor> {
        let mut w = vec![SwapFactor::Crossing; 5];
        w.push(SwapFactor::Diag(alpha));
        w.extend([SwapFactor::Crossing; 5]);
        w
    };
    // Q(α) = R(π) · B_diag(α) · R(π) rotates about n_q = φ(R(π))·ẑ.
    let rpi = word_so3(&r_word(PI));
    let n_q = so3_apply(&rpi, [0.0, 0.0, 1.0]);
    let q_word = |alpha: f64| -> Vec<SwapFactor> {
        let mut w = r_word(PI);
        w.push(SwapFactor::Diag(alpha));
        w.extend(r_word(PI));
        w
    };

    // Root-find α' with the conjugated axis perpendicular to n_q. The
    // separation is even in α', so the orientation of the conjugating
    // rotation does not matter here.
    let f = |alpha: f64| {
        let rz = so3_axis_angle([0.0, 0.0, 1.0], alpha);
        dot(so3_apply(&rz, n_q), n_q)
    };
    let (mut lo, mut hi) = (0.0f64, PI);
    if !(f(lo) > 0.0 && f(hi) < 0.0) {
        return Err(Error::Domain(
            "no perpendicular conjugated axis; generator geometry degenerate".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha_perp = 0.5 * (lo + hi);
    let q_perp_word = |beta: f64| -> Vec<SwapFactor> {
        let mut w = vec![SwapFactor::Diag(alpha_perp)];
        w.extend(q_word(beta));
        w.push(SwapFactor::Diag(-alpha_perp));
        w
    };
    // Adjoint of B_diag(α') is the rotation by −α' about ẑ.
    let n_qp = so3_apply(&so3_axis_angle([0.0, 0.0, 1.0], -alpha_perp), n_q);

    // Target: T = rot(π, x̂) · rot(π, n_b), so that T · φ(B_n⁵) = rot(π, x̂).
    let target = so3_mul(
        &so3_axis_angle([1.0, 0.0, 0.0], PI),
        &so3_axis_angle(n_b, PI),
    );
    // Euler-decompose the target over the (n_q, n_qp) axes.
    let frame = {
        let x = n_qp;
        let z = n_q;
        let y = cross(z, x);
        [
            [x[0], y[0], z[0]],
            [x[1], y[1], z[1]],
            [x[2], y[2], z[2]],
        ]
    };
    let t_tilde = so3_mul(&so3_transpose(&frame), &so3_mul(&target, &frame));
    let (gamma, beta, alpha) = euler_zxz(&t_tilde);

    // Negated angles: the adjoint action realizes rot(n_q, +γ) etc.
    let mut word = q_word(-gamma);
    word.extend(q_perp_word(-beta));
    word.extend(q_word(-alpha));
    word.extend([SwapFactor::Crossing; 5]);

    // The product is ±σx; a B_diag(2π) = −1 factor fixes the sign.
    let p = word_product_2x2(&word);
    let mut sigma_x = identity_like(2);
    sigma_x[(0, 0)] = Complex64::default();
    sigma_x[(1, 1)] = Complex64::default();
    sigma_x[(0, 1)] = Complex64::new(1.0, 0.0);
    sigma_x[(1, 0)] = Complex64::new(1.0, 0.0);
    if max_abs_diff(&p, &sigma_x.mapv(|z| -z)) < 1e-8 {
        word.push(SwapFactor::Diag(2.0 * PI));
    } else if max_abs_diff(&p, &sigma_x) >= 1e-8 {
        return Err(Error::Domain(format!(
            "swap word did not converge to the exchange (residual {:.3e})",
            max_abs_diff(&p, &sigma_x)
        )));
    }
    Ok(word)
}

/// Assemble the block constructions on the five-class space of `string_len`
/// symbols: M_swap from the numeric two-level word, M_unphase, the clean
/// swap, and M_gen(V, W) built from seven-block factors routed through the
/// C block. V acts on the p-side (dimension f_{L−1}), W on the *-side
/// (dimension f_{L−2}).
pub fn block_constructions(
    string_len: usize,
    v: &Array2<Complex64>,
    w: &Array2<Complex64>,
) -> Result<BlockConstruction> {
    let space = FiveBlockSpace::new(string_len)?;
    let dim = space.dim();
    let p_dim = space.p_side().len();
    let star_dim = space.star_side().len();
    if v.dim() != (p_dim, p_dim) {
        return Err(Error::Domain(format!(
            "V must be {p_dim}x{p_dim} for {string_len} symbols"
        )));
    }
    if w.dim() != (star_dim, star_dim) {
        return Err(Error::Domain(format!(
            "W must be {star_dim}x{star_dim} for {string_len} symbols"
        )));
    }

    let m_n = m_crossing(&space);

    // M_swap: lift the exact-swap word to the five-class space.
    let word = swap_word()?;
    let mut m_swap = identity_like(dim);
    for &f in &word {
        let factor = match f {
            SwapFactor::Diag(alpha) => m_diag(&space, alpha),
            SwapFactor::Crossing => m_n.clone(),
        };
        m_swap = mat_mul(&m_swap, &factor);
    }

    // Phases accumulated on the first three classes: (φ₁, φ₂, φ₂).
    let phi1 = m_swap[(space.class_range(0).start, space.class_range(0).start)];
    let phi2 = m_swap[(space.class_range(1).start, space.class_range(1).start)];
    let mut m_unphase = identity_like(dim);
    for i in space.class_range(0) {
        m_unphase[(i, i)] = phi1.conj();
    }
    for i in space.class_range(1).chain(space.class_range(2)) {
        m_unphase[(i, i)] = phi2.conj();
    }
    let m_clean = mat_mul(&m_unphase, &m_swap);

    let m_gen = build_m_gen(&space, v, w, &m_clean)?;

    Ok(BlockConstruction {
        space,
        m_n,
        m_swap,
        m_unphase,
        m_clean,
        m_gen,
        swap_factor_count: word.len(),
    })
}

/// Block-diagonal unitary: A on classes 1⊕2, C on classes 3⊕4, B on class 5.
pub fn m_acb(
    space: &FiveBlockSpace,
    a: &Array2<Complex64>,
    c: &Array2<Complex64>,
    b: &Array2<Complex64>,
) -> Result<Array2<Complex64>> {
    let a_range = space.star_side();
    let c_range = space.class_range(2).start..space.class_range(3).end;
    let b_range = space.class_range(4);
    if a.dim().0 != a_range.len() || c.dim().0 != c_range.len() || b.dim().0 != b_range.len() {
        return Err(Error::Domain("block dimension mismatch".into()));
    }
    let mut m = identity_like(space.dim());
    for (block, range) in [(a, a_range), (c, c_range), (b, b_range)] {
        for (i, ri) in range.clone().enumerate() {
            for (j, rj) in range.clone().enumerate() {
                m[(ri, rj)] = block[(i, j)];
            }
        }
    }
    Ok(m)
}

fn build_m_gen(
    space: &FiveBlockSpace,
    v: &Array2<Complex64>,
    w: &Array2<Complex64>,
    _m_clean: &Array2<Complex64>,
) -> Result<Array2<Complex64>> {
    let dim = space.dim();
    let p_side = space.p_side();
    let c_dim = space.class_range(2).len() + space.class_range(3).len();

    // W goes straight into the A block.
    let base = m_acb(
        space,
        w,
        &identity_like(c_dim),
        &identity_like(space.class_range(4).len()),
    )?;

    // V on the p-side: seven factors of support ≤ f_{L−1}/2, each permuted
    // into the C block, applied there, and permuted back.
    let factors = seven_block_decompose(v)?;
    let mut lifted_product = identity_like(dim);
    for f in &factors {
        if f.support.len() > c_dim {
            return Err(Error::Domain(
                "factor support exceeds the C-block capacity".into(),
            ));
        }
        // Permutation of the p-side states sending the support into the
        // leading C-block slots, order preserved elsewhere.
        let p_len = p_side.len();
        let mut perm = vec![usize::MAX; p_len];
        for (slot, &s) in f.support.iter().enumerate() {
            perm[s] = slot;
        }
        let mut next = f.support.len();
        for p in perm.iter_mut() {
            if *p == usize::MAX {
                *p = next;
                next += 1;
            }
        }
        let mut perm_full = identity_like(dim);
        for (src, &dst) in perm.iter().enumerate() {
            let (from, to) = (p_side.start + src, p_side.start + dst);
            perm_full[(from, from)] = Complex64::default();
            perm_full[(to, from)] = Complex64::new(1.0, 0.0);
        }
        // C-block operator holding the factor in its leading slots.
        let mut c_mat = identity_like(c_dim);
        for a in 0..f.support.len() {
            for b in 0..f.support.len() {
                c_mat[(a, b)] = f.matrix[(a, b)];
            }
        }
        let staged = m_acb(
            space,
            &identity_like(space.star_side().len()),
            &c_mat,
            &identity_like(space.class_range(4).len()),
        )?;
        let lifted = mat_mul(
            &crate::linalg::adjoint(&perm_full),
            &mat_mul(&staged, &perm_full),
        );
        lifted_product = mat_mul(&lifted_product, &lifted);
    }
    Ok(mat_mul(&lifted_product, &base))
}
