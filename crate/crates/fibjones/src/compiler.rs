//! Compile a braid into a DQC1 circuit over the Zeckendorf bit encoding.
//!
//! Basis strings live in a data register as integers z < f_{L+2} (L = n+1
//! symbols). Each crossing circuit moves an encoding split up to the crossing,
//! extracts the three relevant symbols into ancilla qubits by
//! compare-and-subtract steps, applies the local crossing unitary on the
//! ancillas, and uncomputes everything. All arithmetic is built from
//! reversible primitives that permute the full basis, so the whole circuit is
//! a unitary the one-clean-qubit sampler can drive column by column.
//!
//! Register layout (low bits first): data z | left split register | three
//! symbol ancillas | seam bit | weight qubit | tag qubit. A single tag flip
//! at circuit start removes every non-coding or dirty-ancilla basis state
//! from the trace; a controlled rotation on the weight qubit imposes the
//! Markov weights. The constant κ then satisfies
//! κ·Tr(operator) = weighted_trace(b).

use crate::braid::BraidWord;
use crate::dqc1::{estimate_normalized_trace_with_samples, samples_required, Dqc1Estimate, UnitaryOracle};
use crate::error::{Error, Result};
use crate::fibrep::{constants, fibonacci, zeckendorf_decode, Symbol, SymbolString};
use crate::jones::{jones_from_trace, JonesResult};
use ndarray::Array2;
use num_complex::Complex64;

/// Strand cap for compilation; beyond this the dense checks stop being
/// desk-scale.
pub const MAX_COMPILE_STRANDS: usize = 8;

const TABLE_BITS_LIMIT: usize = 16;

// ---------------------------------------------------------------------------
// Host-side split encoding (Fig.-9-style integer pairs)
// ---------------------------------------------------------------------------

/// Extract the leftmost symbol of a length-`len` string from its Zeckendorf
/// value: `*` exactly when z ≥ f_{len+1}, remainder z − f_{len+1}.
pub fn leftmost_extract(len: usize, z: u64) -> Result<(Symbol, u64)> {
    if len == 0 {
        return Err(Error::Domain("cannot extract from an empty string".into()));
    }
    if z >= fibonacci(len + 2) {
        return Err(Error::Domain(format!(
            "z = {z} out of range for length {len}"
        )));
    }
    let threshold = fibonacci(len + 1);
    if z >= threshold {
        Ok((Symbol::Star, z - threshold))
    } else {
        Ok((Symbol::P, z))
    }
}

/// A string of `len` symbols split after the first `split` of them, encoded
/// as an integer pair. The left piece is read in the reversed direction
/// (its seam symbol is most significant), the right piece normally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitState {
    pub len: usize,
    pub split: usize,
    pub left_z: u64,
    pub right_z: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDir {
    Right,
    Left,
}

/// Encode a string with the split at a given position.
pub fn split_from_string(s: &SymbolString, split: usize) -> Result<SplitState> {
    if split > s.len() {
        return Err(Error::Domain(format!(
            "split {split} beyond string length {}",
            s.len()
        )));
    }
    let left_rev: Vec<Symbol> = s.symbols()[..split].iter().rev().copied().collect();
    let left_z = if split == 0 {
        0
    } else {
        crate::fibrep::zeckendorf_encode(&SymbolString::new(left_rev)?)
    };
    let right = &s.symbols()[split..];
    let right_z = if right.is_empty() {
        0
    } else {
        crate::fibrep::zeckendorf_encode(&SymbolString::new(right.to_vec())?)
    };
    Ok(SplitState {
        len: s.len(),
        split,
        left_z,
        right_z,
    })
}

/// Decode both pieces and rejoin them; fails on pairs that do not describe
/// a legal string (out-of-range values or a `**` seam).
pub fn split_join(st: &SplitState) -> Result<SymbolString> {
    let mut symbols = Vec::with_capacity(st.len);
    if st.split > 0 {
        let left_rev = zeckendorf_decode(st.split, st.left_z)?;
        symbols.extend(left_rev.symbols().iter().rev().copied());
    } else if st.left_z != 0 {
        return Err(Error::Domain("nonzero left value with empty left piece".into()));
    }
    if st.split < st.len {
        let right = zeckendorf_decode(st.len - st.split, st.right_z)?;
        symbols.extend(right.symbols().iter().copied());
    } else if st.right_z != 0 {
        return Err(Error::Domain("nonzero right value with empty right piece".into()));
    }
    SymbolString::new(symbols)
}

/// Move the split one symbol right or left. Rightward extracts the leftmost
/// symbol of the right piece and, when it is `*`, adds the matching
/// reversed-direction Fibonacci weight to the left piece; leftward is the
/// exact inverse.
pub fn split_shift(st: &SplitState, dir: ShiftDir) -> Result<SplitState> {
    match dir {
        ShiftDir::Right => {
            if st.split >= st.len {
                return Err(Error::Domain("split already at the right end".into()));
            }
            let right_len = st.len - st.split;
            let (sym, rest) = leftmost_extract(right_len, st.right_z)?;
            let left_z = match sym {
                Symbol::Star => st.left_z + fibonacci(st.split + 2),
                Symbol::P => st.left_z,
            };
            Ok(SplitState {
                len: st.len,
                split: st.split + 1,
                left_z,
                right_z: rest,
            })
        }
        ShiftDir::Left => {
            if st.split == 0 {
                return Err(Error::Domain("split already at the left end".into()));
            }
            let threshold = fibonacci(st.split + 1);
            let star = st.left_z >= threshold;
            let left_z = if star { st.left_z - threshold } else { st.left_z };
            let right_z = if star {
                st.right_z + fibonacci(st.len - st.split + 2)
            } else {
                st.right_z
            };
            Ok(SplitState {
                len: st.len,
                split: st.split - 1,
                left_z,
                right_z,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Reversible primitives
// ---------------------------------------------------------------------------

/// A contiguous bit field inside a basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitField {
    pub offset: usize,
    pub width: usize,
}

impl BitField {
    pub fn mask(&self) -> u64 {
        if self.width == 0 {
            0
        } else if self.width >= 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    pub fn get(&self, x: u64) -> u64 {
        (x >> self.offset) & self.mask()
    }

    pub fn with(&self, x: u64, v: u64) -> u64 {
        (x & !(self.mask() << self.offset)) | ((v & self.mask()) << self.offset)
    }
}

/// Conditions usable by the tag flip.
#[derive(Debug, Clone)]
pub struct JunkSpec {
    pub data: BitField,
    /// Coding values are 0..coding_count in the data field.
    pub coding_count: u64,
    pub zero_fields: Vec<BitField>,
    pub zero_bits: Vec<usize>,
}

impl JunkSpec {
    pub fn is_junk(&self, x: u64) -> bool {
        self.data.get(x) >= self.coding_count
            || self.zero_fields.iter().any(|f| f.get(x) != 0)
            || self.zero_bits.iter().any(|&b| (x >> b) & 1 == 1)
    }
}

/// One reversible arithmetic step. Every variant is a permutation of the
/// full basis: comparisons flip a bit, additions are modular in their field.
#[derive(Debug, Clone)]
pub enum PermStep {
    /// bit ^= [field ≥ threshold]
    FlipIfGe {
        field: BitField,
        threshold: u64,
        bit: usize,
    },
    /// field = (field + amount) mod 2^width, optionally controlled by a bit.
    AddConstMod {
        field: BitField,
        amount: u64,
        control: Option<usize>,
    },
    /// field = (field − amount) mod 2^width, optionally controlled by a bit.
    SubConstMod {
        field: BitField,
        amount: u64,
        control: Option<usize>,
    },
    /// bit ^= [state is junk]
    FlipIfJunk { spec: JunkSpec, bit: usize },
}

impl PermStep {
    pub fn apply(&self, x: u64) -> u64 {
        match self {
            PermStep::FlipIfGe {
                field,
                threshold,
                bit,
            } => {
                if field.get(x) >= *threshold {
                    x ^ (1u64 << bit)
                } else {
                    x
                }
            }
            PermStep::AddConstMod {
                field,
                amount,
                control,
            } => {
                if control.map_or(true, |b| (x >> b) & 1 == 1) {
                    field.with(x, field.get(x).wrapping_add(*amount))
                } else {
                    x
                }
            }
            PermStep::SubConstMod {
                field,
                amount,
                control,
            } => {
                if control.map_or(true, |b| (x >> b) & 1 == 1) {
                    field.with(x, field.get(x).wrapping_sub(*amount))
                } else {
                    x
                }
            }
            PermStep::FlipIfJunk { spec, bit } => {
                if spec.is_junk(x) {
                    x ^ (1u64 << bit)
                } else {
                    x
                }
            }
        }
    }
}

pub fn apply_steps(steps: &[PermStep], mut x: u64) -> u64 {
    for s in steps {
        x = s.apply(x);
    }
    x
}

/// Exhaustively check that a step sequence permutes `0..2^bits`.
pub fn steps_are_permutation(steps: &[PermStep], bits: usize) -> bool {
    let dim = 1u64 << bits;
    let mut seen = vec![false; dim as usize];
    for x in 0..dim {
        let y = apply_steps(steps, x);
        if y >= dim || seen[y as usize] {
            return false;
        }
        seen[y as usize] = true;
    }
    true
}

// ---------------------------------------------------------------------------
// Register layout and circuit assembly
// ---------------------------------------------------------------------------

fn bits_for(count: u64) -> usize {
    if count <= 1 {
        0
    } else {
        64 - (count - 1).leading_zeros() as usize
    }
}

/// Bit assignment for a compiled braid on n strands.
#[derive(Debug, Clone)]
pub struct Layout {
    pub strands: usize,
    /// Symbol-string length L = n + 1.
    pub string_len: usize,
    pub data: BitField,
    pub left: BitField,
    pub anc: [usize; 3],
    pub seam: usize,
    pub weight: Option<usize>,
    pub tag: Option<usize>,
    pub total_bits: usize,
}

impl Layout {
    pub fn new(strands: usize, with_weight_and_tag: bool) -> Layout {
        let string_len = strands + 1;
        let data_bits = bits_for(fibonacci(string_len + 2));
        // The split never moves past position L−3, so the left register only
        // needs to hold values below f_{L−1}.
        let left_bits = if string_len >= 3 {
            bits_for(fibonacci(string_len - 1))
        } else {
            0
        };
        let data = BitField {
            offset: 0,
            width: data_bits,
        };
        let left = BitField {
            offset: data_bits,
            width: left_bits,
        };
        let anc0 = data_bits + left_bits;
        let seam = anc0 + 3;
        let (weight, tag, total_bits) = if with_weight_and_tag {
            (Some(seam + 1), Some(seam + 2), seam + 3)
        } else {
            (None, None, seam + 1)
        };
        Layout {
            strands,
            string_len,
            data,
            left,
            anc: [anc0, anc0 + 1, anc0 + 2],
            seam,
            weight,
            tag,
            total_bits,
        }
    }

    pub fn coding_count(&self) -> u64 {
        fibonacci(self.string_len + 2)
    }

    fn junk_spec(&self) -> JunkSpec {
        JunkSpec {
            data: self.data,
            coding_count: self.coding_count(),
            zero_fields: vec![self.left],
            zero_bits: vec![self.anc[0], self.anc[1], self.anc[2], self.seam],
        }
    }

    /// Basis index whose data field holds z and every other register is clean.
    pub fn embed_coding(&self, z: u64) -> u64 {
        self.data.with(0, z)
    }
}

/// One gate of a compiled circuit after assembly.
enum ResolvedOp {
    Table(Vec<u32>),
    Steps(Vec<PermStep>),
    /// The local crossing unitary on the three symbol ancillas.
    Rules { bits: [usize; 3], conjugate: bool },
    /// Rotation on one qubit, applied when the data field satisfies a
    /// precomputed condition table.
    Rotation {
        bit: usize,
        cos_half: f64,
        sin_half: f64,
        cond_field: BitField,
        cond: Vec<bool>,
    },
}

/// A unitary presented as a gate list; columns are computed on demand and
/// never materialized into a dense matrix.
pub struct CircuitOracle {
    qubits: usize,
    ops: Vec<ResolvedOp>,
}

impl CircuitOracle {
    fn merge(comps: &mut Vec<(u64, Complex64)>) {
        comps.sort_unstable_by_key(|&(i, _)| i);
        let mut out: Vec<(u64, Complex64)> = Vec::with_capacity(comps.len());
        for &(i, amp) in comps.iter() {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += amp,
                _ => out.push((i, amp)),
            }
        }
        out.retain(|&(_, amp)| amp != Complex64::default());
        *comps = out;
    }

    pub fn gate_count(&self) -> usize {
        self.ops.len()
    }
}

impl UnitaryOracle for CircuitOracle {
    fn qubits(&self) -> usize {
        self.qubits
    }

    fn column(&self, x: u64) -> Vec<(u64, Complex64)> {
        let k = constants();
        let mut comps: Vec<(u64, Complex64)> = vec![(x, Complex64::new(1.0, 0.0))];
        for op in &self.ops {
            match op {
                ResolvedOp::Table(t) => {
                    for c in comps.iter_mut() {
                        c.0 = t[c.0 as usize] as u64;
                    }
                }
                ResolvedOp::Steps(steps) => {
                    for c in comps.iter_mut() {
                        c.0 = apply_steps(steps, c.0);
                    }
                }
                ResolvedOp::Rules { bits, conjugate } => {
                    let cc = |z: Complex64| if *conjugate { z.conj() } else { z };
                    let mut next = Vec::with_capacity(comps.len() * 2);
                    for &(idx, amp) in comps.iter() {
                        let pat = (
                            (idx >> bits[0]) & 1 == 1,
                            (idx >> bits[1]) & 1 == 1,
                            (idx >> bits[2]) & 1 == 1,
                        );
                        let flip_mid = idx ^ (1u64 << bits[1]);
                        match pat {
                            (false, false, false) => {
                                next.push((idx, amp * cc(k.e)));
                                next.push((flip_mid, amp * cc(k.d)));
                            }
                            (false, true, false) => {
                                next.push((idx, amp * cc(k.c)));
                                next.push((flip_mid, amp * cc(k.d)));
                            }
                            (true, false, false) | (false, false, true) => {
                                next.push((idx, amp * cc(k.a)));
                            }
                            (true, false, true) => {
                                next.push((idx, amp * cc(k.b)));
                            }
                            // Patterns with adjacent stars never arise from
                            // coding states; act as identity there.
                            _ => next.push((idx, amp)),
                        }
                    }
                    comps = next;
                    Self::merge(&mut comps);
                }
                ResolvedOp::Rotation {
                    bit,
                    cos_half,
                    sin_half,
                    cond_field,
                    cond,
                } => {
                    let mut next = Vec::with_capacity(comps.len() * 2);
                    for &(idx, amp) in comps.iter() {
                        if !cond[cond_field.get(idx) as usize] {
                            next.push((idx, amp));
                            continue;
                        }
                        let flipped = idx ^ (1u64 << bit);
                        if (idx >> bit) & 1 == 0 {
                            next.push((idx, amp * *cos_half));
                            next.push((flipped, amp * *sin_half));
                        } else {
                            next.push((idx, amp * *cos_half));
                            next.push((flipped, amp * -*sin_half));
                        }
                    }
                    comps = next;
                    Self::merge(&mut comps);
                }
            }
        }
        comps
    }
}

struct CircuitBuilder {
    qubits: usize,
    ops: Vec<ResolvedOp>,
    pending: Vec<PermStep>,
}

impl CircuitBuilder {
    fn new(qubits: usize) -> Self {
        CircuitBuilder {
            qubits,
            ops: Vec::new(),
            pending: Vec::new(),
        }
    }

    fn steps(&mut self, steps: impl IntoIterator<Item = PermStep>) {
        self.pending.extend(steps);
    }

    fn flush(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        let steps = std::mem::take(&mut self.pending);
        if self.qubits <= TABLE_BITS_LIMIT {
            let dim = 1usize << self.qubits;
            let mut table = vec![0u32; dim];
            for (x, slot) in table.iter_mut().enumerate() {
                *slot = apply_steps(&steps, x as u64) as u32;
            }
            self.ops.push(ResolvedOp::Table(table));
        } else {
            self.ops.push(ResolvedOp::Steps(steps));
        }
    }

    fn rules(&mut self, bits: [usize; 3], conjugate: bool) {
        self.flush();
        self.ops.push(ResolvedOp::Rules { bits, conjugate });
    }

    fn rotation(&mut self, op: ResolvedOp) {
        self.flush();
        self.ops.push(op);
    }

    fn finish(mut self) -> CircuitOracle {
        self.flush();
        CircuitOracle {
            qubits: self.qubits,
            ops: self.ops,
        }
    }
}

/// Shift the encoding split from position k to k+1 (four reversible steps).
fn shift_right_steps(layout: &Layout, k: usize) -> [PermStep; 4] {
    let l = layout.string_len;
    [
        PermStep::FlipIfGe {
            field: layout.data,
            threshold: fibonacci(l - k + 1),
            bit: layout.seam,
        },
        PermStep::SubConstMod {
            field: layout.data,
            amount: fibonacci(l - k + 1),
            control: Some(layout.seam),
        },
        PermStep::AddConstMod {
            field: layout.left,
            amount: fibonacci(k + 2),
            control: Some(layout.seam),
        },
        PermStep::FlipIfGe {
            field: layout.left,
            threshold: fibonacci(k + 2),
            bit: layout.seam,
        },
    ]
}

/// Shift the split from position k to k−1; exact inverse of
/// `shift_right_steps(layout, k−1)`.
fn shift_left_steps(layout: &Layout, k: usize) -> [PermStep; 4] {
    let l = layout.string_len;
    [
        PermStep::FlipIfGe {
            field: layout.left,
            threshold: fibonacci(k + 1),
            bit: layout.seam,
        },
        PermStep::SubConstMod {
            field: layout.left,
            amount: fibonacci(k + 1),
            control: Some(layout.seam),
        },
        PermStep::AddConstMod {
            field: layout.data,
            amount: fibonacci(l - k + 2),
            control: Some(layout.seam),
        },
        PermStep::FlipIfGe {
            field: layout.data,
            threshold: fibonacci(l - k + 2),
            bit: layout.seam,
        },
    ]
}

/// Extract the leftmost symbol of the right piece (length `piece_len`) into
/// an ancilla bit: compare-flip, then conditional subtract.
fn extract_steps(layout: &Layout, piece_len: usize, anc: usize) -> [PermStep; 2] {
    let t = fibonacci(piece_len + 1);
    [
        PermStep::FlipIfGe {
            field: layout.data,
            threshold: t,
            bit: anc,
        },
        PermStep::SubConstMod {
            field: layout.data,
            amount: t,
            control: Some(anc),
        },
    ]
}

/// Inverse of [`extract_steps`]: conditional add, then compare-flip.
fn insert_steps(layout: &Layout, piece_len: usize, anc: usize) -> [PermStep; 2] {
    let t = fibonacci(piece_len + 1);
    [
        PermStep::AddConstMod {
            field: layout.data,
            amount: t,
            control: Some(anc),
        },
        PermStep::FlipIfGe {
            field: layout.data,
            threshold: t,
            bit: anc,
        },
    ]
}

/// The reversible step sequence of one split shift, exposed so the
/// permutation property can be verified exhaustively.
pub fn split_shift_steps(layout: &Layout, k: usize, dir: ShiftDir) -> Vec<PermStep> {
    match dir {
        ShiftDir::Right => shift_right_steps(layout, k).to_vec(),
        ShiftDir::Left => shift_left_steps(layout, k).to_vec(),
    }
}

/// Compare-and-subtract extraction of one symbol into an ancilla bit.
pub fn symbol_extract_steps(layout: &Layout, piece_len: usize, anc_index: usize) -> Vec<PermStep> {
    extract_steps(layout, piece_len, layout.anc[anc_index]).to_vec()
}

/// Inverse write-back of one symbol from an ancilla bit.
pub fn symbol_insert_steps(layout: &Layout, piece_len: usize, anc_index: usize) -> Vec<PermStep> {
    insert_steps(layout, piece_len, layout.anc[anc_index]).to_vec()
}

/// Every permutation step of one crossing circuit, in application order
/// (the non-permutation rules unitary sits between the two halves).
pub fn crossing_permutation_steps(layout: &Layout, i: usize) -> Vec<PermStep> {
    let l = layout.string_len;
    let mut steps = Vec::new();
    for k in 0..i - 1 {
        steps.extend(shift_right_steps(layout, k));
    }
    for j in 0..3 {
        steps.extend(extract_steps(layout, l - (i - 1) - j, layout.anc[j]));
    }
    for j in (0..3).rev() {
        steps.extend(insert_steps(layout, l - (i - 1) - j, layout.anc[j]));
    }
    for k in (0..i - 1).rev() {
        steps.extend(shift_left_steps(layout, k + 1));
    }
    steps
}

fn push_crossing(builder: &mut CircuitBuilder, layout: &Layout, i: usize, inverse: bool) {
    let l = layout.string_len;
    // Move the split to position i−1.
    for k in 0..i - 1 {
        builder.steps(shift_right_steps(layout, k));
    }
    // Extract symbols at string positions i, i+1, i+2.
    for j in 0..3 {
        builder.steps(extract_steps(layout, l - (i - 1) - j, layout.anc[j]));
    }
    builder.rules(layout.anc, inverse);
    // Uncompute.
    for j in (0..3).rev() {
        builder.steps(insert_steps(layout, l - (i - 1) - j, layout.anc[j]));
    }
    for k in (0..i - 1).rev() {
        builder.steps(shift_left_steps(layout, k + 1));
    }
}

fn check_strands(n: usize) -> Result<()> {
    if n > MAX_COMPILE_STRANDS {
        return Err(Error::SizeCap(format!(
            "{n} strands exceeds the compile cap of {MAX_COMPILE_STRANDS}"
        )));
    }
    Ok(())
}

/// The reversible circuit for one crossing σᵢ, without weighting or tagging:
/// data + split + symbol ancillas + seam bit. On coding basis states with
/// clean ancillas it acts exactly as ρ(σᵢ) and returns the ancillas clean.
pub fn crossing_circuit(n: usize, i: usize) -> Result<(CircuitOracle, Layout)> {
    check_strands(n)?;
    if i == 0 || i >= n {
        return Err(Error::GeneratorOutOfRange {
            index: i as i64,
            strands: n,
        });
    }
    let layout = Layout::new(n, false);
    let mut builder = CircuitBuilder::new(layout.total_bits);
    push_crossing(&mut builder, &layout, i, false);
    Ok((builder.finish(), layout))
}

/// The crossings of a whole braid word (rightmost factor applied first),
/// without weighting or tagging. Restricted to coding states this is ρ(b)
/// on the full four-sector string space.
pub fn crossing_product_circuit(b: &BraidWord) -> Result<(CircuitOracle, Layout)> {
    check_strands(b.strands())?;
    let layout = Layout::new(b.strands(), false);
    let mut builder = CircuitBuilder::new(layout.total_bits);
    for &g in b.word().iter().rev() {
        push_crossing(&mut builder, &layout, g.unsigned_abs() as usize, g < 0);
    }
    Ok((builder.finish(), layout))
}

/// A compiled braid: the full DQC1 operator plus its exact normalization.
pub struct CompiledCircuit {
    pub braid: BraidWord,
    pub layout: Layout,
    /// Width of the data register, ⌈log₂ f_{L+2}⌉.
    pub data_qubits: usize,
    /// Everything else: split register, symbol ancillas, seam, weight, tag.
    pub ancilla_qubits: usize,
    pub operator: CircuitOracle,
    /// κ with κ·Tr(operator) = weighted_trace(braid).
    pub normalization: Complex64,
}

impl CompiledCircuit {
    pub fn total_qubits(&self) -> usize {
        self.layout.total_bits
    }

    /// Exact weighted trace through the compiled operator (dense over the
    /// register, column-on-demand; no matrix is materialized).
    pub fn weighted_trace_exact(&self) -> Complex64 {
        self.normalization * self.operator.trace()
    }
}

/// Compile a braid into its DQC1 trace-estimation circuit.
///
/// The operator is WeightRotation · ρ-circuits · TagFlip. The tag flip
/// excludes every junk state (non-coding data, dirty split register or
/// ancillas) from the trace; the rotation imposes the Markov weight W_s/φ
/// via a Y-rotation with ⟨0|R|0⟩ = 1/φ on strings ending in `*`. With the
/// two free qubits (weight, tag) counted, κ = φ^{-(n+1)}/4.
pub fn compile(b: &BraidWord) -> Result<CompiledCircuit> {
    check_strands(b.strands())?;
    let k = constants();
    let layout = Layout::new(b.strands(), true);
    let l = layout.string_len;
    let mut builder = CircuitBuilder::new(layout.total_bits);

    builder.steps([PermStep::FlipIfJunk {
        spec: layout.junk_spec(),
        bit: layout.tag.expect("compile layout has a tag"),
    }]);
    for &g in b.word().iter().rev() {
        push_crossing(&mut builder, &layout, g.unsigned_abs() as usize, g < 0);
    }

    // Weight rotation: strings ending in * get weight 1/φ.
    let coding = layout.coding_count();
    let ends_star: Vec<bool> = (0..(1u64 << layout.data.width))
        .map(|z| {
            z < coding
                && zeckendorf_decode(l, z)
                    .map(|s| s.last() == Symbol::Star)
                    .unwrap_or(false)
        })
        .collect();
    let cos_half = 1.0 / k.phi;
    let sin_half = (1.0 - cos_half * cos_half).sqrt();
    builder.rotation(ResolvedOp::Rotation {
        bit: layout.weight.expect("compile layout has a weight qubit"),
        cos_half,
        sin_half,
        cond_field: layout.data,
        cond: ends_star,
    });

    let data_qubits = layout.data.width;
    let ancilla_qubits = layout.total_bits - data_qubits;
    let kappa = Complex64::new(1.0 / (4.0 * k.phi.powi(b.strands() as i32 + 1)), 0.0);
    Ok(CompiledCircuit {
        braid: b.clone(),
        data_qubits,
        ancilla_qubits,
        operator: builder.finish(),
        normalization: kappa,
        layout,
    })
}

/// A Jones estimate produced by sampling the compiled circuit.
#[derive(Debug, Clone)]
pub struct Dqc1JonesResult {
    pub jones: JonesResult,
    pub estimate: Dqc1Estimate,
    /// Additive radius on the Jones value: |κ|·2^qubits·|D|^{n−1}·ε.
    pub radius: f64,
    pub kappa: Complex64,
    pub total_qubits: usize,
}

/// Run DQC1 trace estimation on the compiled braid and rescale into a Jones
/// value: estimate · κ · 2^qubits, then the (−A)^{3w} D^{n−1} prefactor.
pub fn estimate_jones_dqc1(
    b: &BraidWord,
    epsilon: f64,
    confidence: f64,
    seed: u64,
) -> Result<Dqc1JonesResult> {
    estimate_jones_dqc1_with_samples(b, epsilon, confidence, seed, None)
}

/// Same, with an explicit per-part shot count overriding the Hoeffding bound.
pub fn estimate_jones_dqc1_with_samples(
    b: &BraidWord,
    epsilon: f64,
    confidence: f64,
    seed: u64,
    samples: Option<u64>,
) -> Result<Dqc1JonesResult> {
    let compiled = compile(b)?;
    let n_samples = match samples {
        Some(n) => n,
        None => samples_required(epsilon, confidence)?,
    };
    let est = estimate_normalized_trace_with_samples(
        &compiled.operator,
        n_samples,
        epsilon,
        confidence,
        seed,
    )?;
    let scale = compiled.normalization.re * (1u64 << compiled.total_qubits()) as f64;
    let trace_estimate = est.estimate * scale;
    let jones = jones_from_trace(b, trace_estimate);
    let k = constants();
    let radius = scale * k.big_d.powi(b.strands() as i32 - 1) * epsilon;
    Ok(Dqc1JonesResult {
        jones,
        estimate: est,
        radius,
        kappa: compiled.normalization,
        total_qubits: compiled.total_qubits(),
    })
}

/// Restriction of a circuit to the coding subspace: matrix entries between
/// states |z⟩ with clean registers, plus the largest amplitude that leaked
/// onto non-clean components (0 for an exactly uncomputed circuit).
pub fn coding_restriction(oracle: &CircuitOracle, layout: &Layout) -> (Array2<Complex64>, f64) {
    let count = layout.coding_count() as usize;
    let mut mat = Array2::zeros((count, count));
    let mut leak: f64 = 0.0;
    for z in 0..count {
        let col = oracle.column(layout.embed_coding(z as u64));
        for (idx, amp) in col {
            let zv = layout.data.get(idx);
            let clean = idx == layout.embed_coding(zv) && zv < count as u64;
            if clean {
                mat[(zv as usize, z)] = amp;
            } else {
                leak = leak.max(amp.norm());
            }
        }
    }
    (mat, leak)
}

/// f_{L+2}/2^b for the data register: the coding states always fill more
/// than half of it.
pub fn encoding_efficiency(string_len: usize) -> f64 {
    let count = fibonacci(string_len + 2);
    count as f64 / (1u64 << bits_for(count)) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{parse_braid, BraidWord};
    use crate::dqc1::{estimate_normalized_trace, unitarity_spot_check};
    use crate::error::Error;
    use crate::fibrep::{enumerate_full, zeckendorf_encode};
    use crate::jones::weighted_trace;
    use crate::linalg::max_abs_diff;

    #[test]
    fn leftmost_extract_examples() {
        assert_eq!(leftmost_extract(2, 2).unwrap(), (Symbol::Star, 0));
        assert_eq!(leftmost_extract(2, 1).unwrap(), (Symbol::P, 1));
        assert_eq!(leftmost_extract(5, 6).unwrap(), (Symbol::P, 6));
        assert!(leftmost_extract(2, 3).is_err());
    }

    #[test]
    fn leftmost_extract_agrees_with_decode() {
        for len in 1..=10usize {
            for z in 0..fibonacci(len + 2) {
                let (sym, rest) = leftmost_extract(len, z).unwrap();
                let s = zeckendorf_decode(len, z).unwrap();
                assert_eq!(sym, s.symbols()[0]);
                if len > 1 {
                    let tail = SymbolString::new(s.symbols()[1..].to_vec()).unwrap();
                    assert_eq!(rest, zeckendorf_encode(&tail));
                }
            }
        }
    }

    #[test]
    fn split_encoding_matches_worked_example() {
        // *pp* | pp*ppp ↔ (6, 5); one rightward shift re-joins to the same string.
        let s = SymbolString::parse("*pp*pp*ppp").unwrap();
        let st = split_from_string(&s, 4).unwrap();
        assert_eq!((st.left_z, st.right_z), (6, 5));
        assert_eq!(split_join(&st).unwrap(), s);
        let shifted = split_shift(&st, ShiftDir::Right).unwrap();
        assert_eq!(split_join(&shifted).unwrap(), s);
        // Crossing a * with the split: position 7 carries weight f₈ = 21.
        let mut st = split_from_string(&s, 6).unwrap();
        st = split_shift(&st, ShiftDir::Right).unwrap();
        assert_eq!((st.left_z, st.right_z), (27, 0 + zeckendorf_encode(&SymbolString::parse("ppp").unwrap())));
        assert_eq!(split_join(&st).unwrap(), s);
    }

    #[test]
    fn split_shifts_invert_each_other() {
        for len in 2..=10usize {
            for z in 0..fibonacci(len + 2) {
                let s = zeckendorf_decode(len, z).unwrap();
                for split in 0..len {
                    let st = split_from_string(&s, split).unwrap();
                    let right = split_shift(&st, ShiftDir::Right).unwrap();
                    assert_eq!(split_join(&right).unwrap(), s);
                    let back = split_shift(&right, ShiftDir::Left).unwrap();
                    assert_eq!(back, st);
                }
            }
        }
    }

    #[test]
    fn first_shift_is_leftmost_extract() {
        for len in 2..=8usize {
            for z in 0..fibonacci(len + 2) {
                let s = zeckendorf_decode(len, z).unwrap();
                let st = split_from_string(&s, 0).unwrap();
                let shifted = split_shift(&st, ShiftDir::Right).unwrap();
                let (sym, rest) = leftmost_extract(len, z).unwrap();
                assert_eq!(shifted.right_z, rest);
                assert_eq!(shifted.left_z > 0, sym == Symbol::Star);
            }
        }
    }

    #[test]
    fn primitives_are_permutations_up_to_12_bits() {
        let field = BitField { offset: 0, width: 9 };
        let cases: Vec<(&str, Vec<PermStep>)> = vec![
            (
                "compare-flip",
                vec![PermStep::FlipIfGe {
                    field,
                    threshold: 37,
                    bit: 9,
                }],
            ),
            (
                "add-const-mod",
                vec![PermStep::AddConstMod {
                    field,
                    amount: 89,
                    control: None,
                }],
            ),
            (
                "controlled-sub",
                vec![PermStep::SubConstMod {
                    field,
                    amount: 55,
                    control: Some(10),
                }],
            ),
            (
                "leftmost-extract",
                vec![
                    PermStep::FlipIfGe {
                        field,
                        threshold: fibonacci(12),
                        bit: 9,
                    },
                    PermStep::SubConstMod {
                        field,
                        amount: fibonacci(12),
                        control: Some(9),
                    },
                ],
            ),
        ];
        for (name, steps) in cases {
            assert!(steps_are_permutation(&steps, 12), "{name}");
        }
        // Split shifts on a real layout.
        let layout = Layout::new(5, false);
        for k in 0..=2 {
            assert!(
                steps_are_permutation(&shift_right_steps(&layout, k), layout.total_bits),
                "shift right {k}"
            );
            assert!(
                steps_are_permutation(&shift_left_steps(&layout, k + 1), layout.total_bits),
                "shift left {}",
                k + 1
            );
        }
    }

    #[test]
    fn crossing_circuit_matches_representation() {
        for (n, i) in [(3usize, 1usize), (3, 2), (4, 1), (4, 2), (4, 3)] {
            let (oracle, layout) = crossing_circuit(n, i).unwrap();
            let (mat, leak) = coding_restriction(&oracle, &layout);
            assert!(leak < 1e-12, "ancillas must return clean: n={n} i={i}");
            let expected = crate::fibrep::crossing_operator_full(n, i).unwrap();
            assert!(
                max_abs_diff(&mat, &expected.matrix) < 1e-10,
                "n={n} i={i}"
            );
        }
    }

    #[test]
    fn crossing_product_matches_full_representation() {
        for text in ["B3: 1 2", "B4: 1 2 3 -2", "B4: -1 3 2", "B5: 1 4 -2 3"] {
            let b = parse_braid(text).unwrap();
            let (oracle, layout) = crossing_product_circuit(&b).unwrap();
            let (mat, leak) = coding_restriction(&oracle, &layout);
            assert!(leak < 1e-12, "{text}");
            let expected = crate::fibrep::represent_full(&b);
            assert!(max_abs_diff(&mat, &expected.matrix) < 1e-10, "{text}");
            let _ = enumerate_full(b.strands());
        }
    }

    #[test]
    fn compiled_trace_matches_weighted_trace() {
        for text in ["B1:", "B2: 1", "B3: 1 2", "B4: 1 2 3 -2", "B2: 1 1 1"] {
            let b = parse_braid(text).unwrap();
            let compiled = compile(&b).unwrap();
            let lhs = compiled.weighted_trace_exact();
            let rhs = weighted_trace(&b);
            assert!((lhs - rhs).norm() < 1e-9, "{text}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn compiled_operator_is_unitary() {
        let b = parse_braid("B3: 1 2 -1").unwrap();
        let compiled = compile(&b).unwrap();
        assert!(unitarity_spot_check(&compiled.operator, 25, 3) < 1e-10);
    }

    #[test]
    fn compile_cap() {
        let b = BraidWord::identity(9).unwrap();
        assert!(matches!(compile(&b), Err(Error::SizeCap(_))));
    }

    #[test]
    fn estimate_identity_within_radius() {
        let b = parse_braid("B1:").unwrap();
        let r = estimate_jones_dqc1(&b, 0.05, 0.95, 0).unwrap();
        assert!((r.jones.value - 1.0).norm() <= r.radius * 2.0f64.sqrt());
    }

    #[test]
    fn radius_scales_linearly_with_epsilon() {
        let b = parse_braid("B2: 1 1 1").unwrap();
        let r1 = estimate_jones_dqc1(&b, 0.05, 0.95, 1).unwrap();
        let r2 = estimate_jones_dqc1(&b, 0.025, 0.95, 1).unwrap();
        assert!((r1.radius / r2.radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn encoding_efficiency_exceeds_half() {
        for n in 1..=32usize {
            let eff = encoding_efficiency(n);
            assert!(eff > 0.5, "length {n}: {eff}");
        }
    }

    #[test]
    fn sampling_the_compiled_circuit_tracks_its_dense_trace() {
        let b = parse_braid("B3: 1 2").unwrap();
        let compiled = compile(&b).unwrap();
        let truth = compiled.operator.trace() / (1u64 << compiled.total_qubits()) as f64;
        let est = estimate_normalized_trace(&compiled.operator, 0.05, 0.95, 9).unwrap();
        assert!((est.estimate - truth).norm() <= 0.05 * 2.0f64.sqrt());
    }
}
