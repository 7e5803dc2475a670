//! The Fibonacci representation of the braid group.
//!
//! Basis states are strings over `{p, *}` with no two `*` adjacent, written
//! across the base of an n-strand braid (length n+1). An elementary crossing
//! σᵢ acts locally: only the (i+1)-th symbol may change, with coefficients
//! a, b, c, d, e selected by its two neighbors. The first and last symbols
//! never change, so the space splits into four boundary sectors.
//!
//! Basis order everywhere is ascending Zeckendorf value of the whole string,
//! which makes every matrix in this crate reproducible entry for entry.

use crate::error::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

/// Fibonacci numbers with f₁ = f₂ = 1 (f₀ = 0). Panics above f₉₀.
pub fn fibonacci(k: usize) -> u64 {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![0u64, 1, 1];
        for i in 3..=90 {
            t.push(t[i - 1] + t[i - 2]);
        }
        t
    });
    table[k]
}

/// One symbol of a basis string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    P,
    Star,
}

impl Symbol {
    fn as_char(self) -> char {
        match self {
            Symbol::P => 'p',
            Symbol::Star => '*',
        }
    }
}

/// A `{p, *}` string with no two `*` adjacent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolString(Vec<Symbol>);

impl SymbolString {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Domain("symbol string must be nonempty".into()));
        }
        for w in symbols.windows(2) {
            if w[0] == Symbol::Star && w[1] == Symbol::Star {
                return Err(Error::Domain("adjacent * symbols".into()));
            }
        }
        Ok(SymbolString(symbols))
    }

    /// Parse from text; both `*` and `∗` denote the star symbol.
    pub fn parse(text: &str) -> Result<Self> {
        let mut symbols = Vec::new();
        for ch in text.chars() {
            match ch {
                'p' => symbols.push(Symbol::P),
                '*' | '∗' => symbols.push(Symbol::Star),
                c if c.is_whitespace() => {}
                c => return Err(Error::Domain(format!("invalid symbol {c:?}"))),
            }
        }
        SymbolString::new(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn first(&self) -> Symbol {
        self.0[0]
    }

    pub fn last(&self) -> Symbol {
        *self.0.last().unwrap()
    }

    /// Boundary sector (first symbol, last symbol).
    pub fn sector(&self) -> Sector {
        match (self.first(), self.last()) {
            (Symbol::Star, Symbol::Star) => Sector::StarStar,
            (Symbol::Star, Symbol::P) => Sector::StarP,
            (Symbol::P, Symbol::Star) => Sector::PStar,
            (Symbol::P, Symbol::P) => Sector::PP,
        }
    }
}

impl fmt::Display for SymbolString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// Boundary sector of a basis string: the (first, last) symbol pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    StarStar,
    StarP,
    PStar,
    PP,
}

impl Sector {
    pub const ALL: [Sector; 4] = [Sector::StarStar, Sector::StarP, Sector::PStar, Sector::PP];

    /// Dimension of the sector for an n-strand braid (strings of length n+1):
    /// f_{n-1} for `**`, f_n for `*p` and `p*`, f_{n+1} for `pp`.
    pub fn dimension(self, strands: usize) -> u64 {
        match self {
            Sector::StarStar => fibonacci(strands.saturating_sub(1)),
            Sector::StarP | Sector::PStar => fibonacci(strands),
            Sector::PP => fibonacci(strands + 1),
        }
    }

    pub fn parse(text: &str) -> Result<Sector> {
        match text {
            "**" | "ss" => Ok(Sector::StarStar),
            "*p" | "sp" => Ok(Sector::StarP),
            "p*" | "ps" => Ok(Sector::PStar),
            "pp" => Ok(Sector::PP),
            other => Err(Error::Domain(format!("unknown sector {other:?}"))),
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sector::StarStar => "**",
            Sector::StarP => "*p",
            Sector::PStar => "p*",
            Sector::PP => "pp",
        };
        write!(f, "{s}")
    }
}

/// The scalar data of the representation, all derived from A = e^{-i3π/5}.
#[derive(Debug, Clone)]
pub struct FibConstants {
    /// A = e^{-i3π/5}.
    pub big_a: Complex64,
    /// τ = 2/(1+√5) = 1/φ.
    pub tau: f64,
    /// Golden ratio φ = (1+√5)/2.
    pub phi: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
    /// δ = A − 1, the Markov contraction constant.
    pub delta: Complex64,
    /// Loop value D = φ = −A² − A⁻².
    pub big_d: f64,
}

impl FibConstants {
    fn new() -> Self {
        let big_a = Complex64::from_polar(1.0, -3.0 * PI / 5.0);
        let a4 = big_a.powi(4);
        let a8 = big_a.powi(8);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let tau = 2.0 / (1.0 + 5.0f64.sqrt());
        let a = -a4;
        let b = a8;
        let c = a8 * tau.powi(2) - a4 * tau;
        let d = (a8 + a4) * tau.powf(1.5);
        let e = a8 * tau - a4 * tau.powi(2);
        FibConstants {
            big_a,
            tau,
            phi,
            a,
            b,
            c,
            d,
            e,
            delta: big_a - 1.0,
            big_d: phi,
        }
    }

    /// The evaluation point t = A⁻⁴ = e^{i2π/5}.
    pub fn t(&self) -> Complex64 {
        self.big_a.powi(-4)
    }
}

/// Shared instance of [`FibConstants`].
pub fn constants() -> &'static FibConstants {
    static CONSTS: OnceLock<FibConstants> = OnceLock::new();
    CONSTS.get_or_init(FibConstants::new)
}

// ---------------------------------------------------------------------------
// Zeckendorf indexing
// ---------------------------------------------------------------------------

/// z(s) = Σ sᵢ f_{i+1}, reading `*` as 1 with the rightmost symbol at weight f₂.
pub fn zeckendorf_encode(s: &SymbolString) -> u64 {
    let len = s.len();
    s.symbols()
        .iter()
        .enumerate()
        .map(|(idx, &sym)| match sym {
            Symbol::Star => fibonacci(len - idx + 1),
            Symbol::P => 0,
        })
        .sum()
}

/// Inverse of [`zeckendorf_encode`] on `0 ≤ z < f_{len+2}`.
///
/// Greedy extraction from the left: the symbol at the leftmost remaining
/// position is `*` exactly when the remaining value reaches that position's
/// Fibonacci weight, which never selects two adjacent weights.
pub fn zeckendorf_decode(len: usize, z: u64) -> Result<SymbolString> {
    if len == 0 {
        return Err(Error::Domain("length must be >= 1".into()));
    }
    if z >= fibonacci(len + 2) {
        return Err(Error::Domain(format!(
            "z = {z} out of range for length {len} (max {})",
            fibonacci(len + 2) - 1
        )));
    }
    let mut rest = z;
    let mut symbols = Vec::with_capacity(len);
    for idx in 0..len {
        let w = fibonacci(len - idx + 1);
        if rest >= w {
            symbols.push(Symbol::Star);
            rest -= w;
        } else {
            symbols.push(Symbol::P);
        }
    }
    debug_assert_eq!(rest, 0);
    SymbolString::new(symbols)
}

// ---------------------------------------------------------------------------
// Bases and crossing operators
// ---------------------------------------------------------------------------

/// An ordered basis of symbol strings for one sector (or the whole space).
#[derive(Debug, Clone)]
pub struct SectorBasis {
    strands: usize,
    sector: Option<Sector>,
    strings: Vec<SymbolString>,
    zs: Vec<u64>,
}

impl SectorBasis {
    pub fn strands(&self) -> usize {
        self.strands
    }

    /// `None` means the full f_{n+3}-dimensional space of all four sectors.
    pub fn sector(&self) -> Option<Sector> {
        self.sector
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn strings(&self) -> &[SymbolString] {
        &self.strings
    }

    pub fn string_length(&self) -> usize {
        self.strands + 1
    }

    /// Index of a string in this basis, by its Zeckendorf value.
    pub fn position_of(&self, s: &SymbolString) -> Option<usize> {
        let z = zeckendorf_encode(s);
        self.zs.binary_search(&z).ok()
    }

    fn position_of_z(&self, z: u64) -> Option<usize> {
        self.zs.binary_search(&z).ok()
    }
}

/// All length-(n+1) strings with the given boundary, in ascending Zeckendorf order.
pub fn enumerate_sector(n: usize, sector: Sector) -> SectorBasis {
    enumerate(n, Some(sector))
}

/// All length-(n+1) strings of every sector, in ascending Zeckendorf order.
pub fn enumerate_full(n: usize) -> SectorBasis {
    enumerate(n, None)
}

fn enumerate(n: usize, sector: Option<Sector>) -> SectorBasis {
    let len = n + 1;
    let mut strings = Vec::new();
    let mut zs = Vec::new();
    for z in 0..fibonacci(len + 2) {
        let s = zeckendorf_decode(len, z).expect("in range");
        if sector.map_or(true, |sec| s.sector() == sec) {
            strings.push(s);
            zs.push(z);
        }
    }
    SectorBasis {
        strands: n,
        sector,
        strings,
        zs,
    }
}

/// A dense complex matrix over one sector basis.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    pub basis: SectorBasis,
    pub matrix: Array2<Complex64>,
}

impl SectorOperator {
    pub fn identity(basis: SectorBasis) -> Self {
        let dim = basis.len();
        let mut matrix = Array2::zeros((dim, dim));
        for i in 0..dim {
            matrix[(i, i)] = Complex64::new(1.0, 0.0);
        }
        SectorOperator { basis, matrix }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// Matrix entry addressed by basis strings instead of raw indices.
    pub fn entry(&self, row: &SymbolString, col: &SymbolString) -> Option<Complex64> {
        let r = self.basis.position_of(row)?;
        let c = self.basis.position_of(col)?;
        Some(self.matrix[(r, c)])
    }
}

/// How σᵢ acts on one basis string: a diagonal phase or a two-string mix.
#[derive(Debug, Clone, Copy)]
enum ActionEntry {
    Diag(Complex64),
    Mix {
        partner: usize,
        stay: Complex64,
        flip: Complex64,
    },
}

fn crossing_entries(basis: &SectorBasis, i: usize) -> Vec<ActionEntry> {
    let k = constants();
    let len = basis.string_length();
    // σᵢ may change the 0-indexed symbol i; neighbors are i-1 and i+1.
    let weight = fibonacci(len - i + 1);
    basis
        .strings
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let sym = s.symbols();
            match (sym[i - 1], sym[i], sym[i + 1]) {
                (Symbol::Star, Symbol::P, Symbol::P) => ActionEntry::Diag(k.a),
                (Symbol::Star, Symbol::P, Symbol::Star) => ActionEntry::Diag(k.b),
                (Symbol::P, Symbol::P, Symbol::Star) => ActionEntry::Diag(k.a),
                (Symbol::P, Symbol::Star, Symbol::P) => {
                    let partner = basis
                        .position_of_z(basis.zs[j] - weight)
                        .expect("flip target stays in sector");
                    ActionEntry::Mix {
                        partner,
                        stay: k.c,
                        flip: k.d,
                    }
                }
                (Symbol::P, Symbol::P, Symbol::P) => {
                    let partner = basis
                        .position_of_z(basis.zs[j] + weight)
                        .expect("flip target stays in sector");
                    ActionEntry::Mix {
                        partner,
                        stay: k.e,
                        flip: k.d,
                    }
                }
                _ => unreachable!("adjacent stars cannot occur in a legal string"),
            }
        })
        .collect()
}

/// Right-multiply `mat` by ρ(σᵢ) (or its conjugate transpose), in place.
/// Each crossing mixes at most two strings, so this is O(dim²).
fn apply_right(mat: &mut Array2<Complex64>, entries: &[ActionEntry], conj: bool) {
    let dim = entries.len();
    let cc = |z: Complex64| if conj { z.conj() } else { z };
    for c in 0..dim {
        match entries[c] {
            ActionEntry::Diag(w) => {
                let w = cc(w);
                for r in 0..dim {
                    mat[(r, c)] *= w;
                }
            }
            ActionEntry::Mix { partner, stay, flip } => {
                if partner < c {
                    continue; // handled together with the partner column
                }
                let (sc, f) = (cc(stay), cc(flip));
                let sp = match entries[partner] {
                    ActionEntry::Mix { stay, .. } => cc(stay),
                    ActionEntry::Diag(_) => unreachable!("mix partners come in pairs"),
                };
                for r in 0..dim {
                    let x = mat[(r, c)];
                    let y = mat[(r, partner)];
                    mat[(r, c)] = sc * x + f * y;
                    mat[(r, partner)] = f * x + sp * y;
                }
            }
        }
    }
}

/// Matrix of ρ(σᵢ) on one sector, 1 ≤ i ≤ n−1.
pub fn crossing_operator(n: usize, i: usize, sector: Sector) -> Result<SectorOperator> {
    crossing_operator_on(enumerate_sector(n, sector), i)
}

/// Matrix of ρ(σᵢ) on the full four-sector space.
pub fn crossing_operator_full(n: usize, i: usize) -> Result<SectorOperator> {
    crossing_operator_on(enumerate_full(n), i)
}

fn crossing_operator_on(basis: SectorBasis, i: usize) -> Result<SectorOperator> {
    check_generator(basis.strands(), i)?;
    let mut op = SectorOperator::identity(basis);
    let entries = crossing_entries(&op.basis, i);
    apply_right(&mut op.matrix, &entries, false);
    Ok(op)
}

fn check_generator(n: usize, i: usize) -> Result<()> {
    if i == 0 || i >= n {
        return Err(Error::GeneratorOutOfRange {
            index: i as i64,
            strands: n,
        });
    }
    Ok(())
}

/// ρ(b) on one sector: the ordered product of crossing operators, with
/// inverse crossings contributing the conjugate transpose.
pub fn represent(b: &crate::braid::BraidWord, sector: Sector) -> SectorOperator {
    represent_on(b, enumerate_sector(b.strands(), sector))
}

/// ρ(b) on the full four-sector space.
pub fn represent_full(b: &crate::braid::BraidWord) -> SectorOperator {
    represent_on(b, enumerate_full(b.strands()))
}

fn represent_on(b: &crate::braid::BraidWord, basis: SectorBasis) -> SectorOperator {
    let mut op = SectorOperator::identity(basis);
    let mut cache: Vec<Option<Vec<ActionEntry>>> = vec![None; b.strands()];
    for &g in b.word() {
        let i = g.unsigned_abs() as usize;
        let entries =
            cache[i].get_or_insert_with(|| crossing_entries(&op.basis, i));
        apply_right(&mut op.matrix, entries, g < 0);
    }
    op
}

// ---------------------------------------------------------------------------
// Path-model bijection (k = 5)
// ---------------------------------------------------------------------------

/// n-step walks on the four rungs of the k=5 ladder, starting at the bottom,
/// paired with the symbol strings read off the rung labels (*, p, p, * from
/// the bottom up). The map is a bijection onto length-(n+1) strings starting
/// with `*`.
pub fn path_bijection(n: usize) -> Vec<(Vec<u8>, SymbolString)> {
    const LABELS: [Symbol; 4] = [Symbol::Star, Symbol::P, Symbol::P, Symbol::Star];
    let mut out = Vec::new();
    let mut stack = vec![vec![0u8]];
    while let Some(path) = stack.pop() {
        if path.len() == n + 1 {
            let symbols = path.iter().map(|&r| LABELS[r as usize]).collect();
            let s = SymbolString::new(symbols).expect("rung labels alternate * legally");
            out.push((path, s));
            continue;
        }
        let last = *path.last().unwrap();
        if last + 1 < 4 {
            let mut up = path.clone();
            up.push(last + 1);
            stack.push(up);
        }
        if last > 0 {
            let mut down = path;
            down.push(last - 1);
            stack.push(down);
        }
    }
    out.sort_by_key(|(path, _)| path.clone());
    out
}
