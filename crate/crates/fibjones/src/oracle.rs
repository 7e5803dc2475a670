//! Brute-force Jones evaluation in the Temperley-Lieb algebra.
//!
//! Every crossing is resolved as ρ_A(σᵢ) = A·Eᵢ + A⁻¹·1 (conjugate weights
//! for inverse crossings), the resulting planar diagrams are multiplied with
//! loop counting, and the Markov trace closes the diagram. This never touches
//! the Fibonacci representation, so it serves as ground truth against `jones`.

use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::fibrep::constants;
use num_complex::Complex64;

/// Hard cap on crossings: the resolution sum has 2^m terms.
pub const MAX_ORACLE_CROSSINGS: usize = 20;

/// A crossingless pairing of 2n boundary points (top 0..n, bottom n..2n),
/// together with the number of closed loops absorbed while composing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanarMatching {
    n: usize,
    pairing: Vec<usize>,
    loops_absorbed: u32,
}

impl PlanarMatching {
    /// The identity diagram: top i joined straight to bottom i.
    pub fn identity(n: usize) -> Self {
        let pairing = (0..2 * n).map(|k| (k + n) % (2 * n)).collect();
        PlanarMatching {
            n,
            pairing,
            loops_absorbed: 0,
        }
    }

    /// The Temperley-Lieb generator Eᵢ (1-indexed, i ≤ n−1): a cup joining
    /// tops i, i+1 and a cap joining the same bottoms.
    pub fn e_generator(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::GeneratorOutOfRange {
                index: i as i64,
                strands: n,
            });
        }
        let mut m = PlanarMatching::identity(n);
        let (t0, t1) = (i - 1, i);
        let (b0, b1) = (n + i - 1, n + i);
        m.pairing[t0] = t1;
        m.pairing[t1] = t0;
        m.pairing[b0] = b1;
        m.pairing[b1] = b0;
        m
            .check()
            .expect("generator diagram is a perfect matching");
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn loops_absorbed(&self) -> u32 {
        self.loops_absorbed
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    fn check(&self) -> Result<()> {
        for (k, &p) in self.pairing.iter().enumerate() {
            if p >= 2 * self.n || p == k || self.pairing[p] != k {
                return Err(Error::Domain("not a perfect matching".into()));
            }
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn unite(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Stack `x` on top of `y`, joining x's bottom boundary to y's top boundary.
/// Closed loops formed at the seam increment `loops_absorbed`.
pub fn tl_compose(x: &PlanarMatching, y: &PlanarMatching) -> Result<PlanarMatching> {
    if x.n != y.n {
        return Err(Error::StrandMismatch {
            left: x.n,
            right: y.n,
        });
    }
    let n = x.n;
    // Node ids: x-top 0..n, x-bottom n..2n, y-top 2n..3n, y-bottom 3n..4n.
    let mut uf = UnionFind::new(4 * n);
    for (k, &p) in x.pairing.iter().enumerate() {
        uf.unite(k, p);
    }
    for (k, &p) in y.pairing.iter().enumerate() {
        uf.unite(2 * n + k, 2 * n + p);
    }
    for i in 0..n {
        uf.unite(n + i, 2 * n + i);
    }
    // New boundary: x-top stays top, y-bottom becomes bottom.
    let boundary: Vec<usize> = (0..n).chain(3 * n..4 * n).collect();
    let mut pairing = vec![usize::MAX; 2 * n];
    let mut seen: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for (new_id, &node) in boundary.iter().enumerate() {
        let root = uf.find(node);
        if let Some(&other) = seen.get(&root) {
            pairing[new_id] = other;
            pairing[other] = new_id;
        } else {
            seen.insert(root, new_id);
        }
    }
    // Components with no boundary point are closed loops.
    let mut internal_roots = std::collections::HashSet::new();
    for node in 0..4 * n {
        let root = uf.find(node);
        if !seen.contains_key(&root) {
            internal_roots.insert(root);
        }
    }
    let result = PlanarMatching {
        n,
        pairing,
        loops_absorbed: x.loops_absorbed + y.loops_absorbed + internal_roots.len() as u32,
    };
    result.check()?;
    Ok(result)
}

/// Markov trace of a diagram: join top i to bottom i, count the total loops
/// L, and return D^{loops_absorbed} · D^{L−n}.
pub fn markov_trace_diagram(x: &PlanarMatching) -> Complex64 {
    let n = x.n;
    let mut uf = UnionFind::new(2 * n);
    for (k, &p) in x.pairing.iter().enumerate() {
        uf.unite(k, p);
    }
    for i in 0..n {
        uf.unite(i, n + i);
    }
    let mut roots = std::collections::HashSet::new();
    for k in 0..2 * n {
        let r = uf.find(k);
        roots.insert(r);
    }
    let loops = roots.len() as i32;
    let exponent = x.loops_absorbed as i32 + loops - n as i32;
    Complex64::new(constants().big_d, 0.0).powi(exponent)
}

/// Tr(ρ_A(b)): sum over all 2^m crossing resolutions of
/// weight · markov_trace(diagram product). Depth-first with the partial
/// diagram carried down each branch.
pub fn oracle_trace(b: &BraidWord) -> Result<Complex64> {
    let m = b.crossings();
    if m > MAX_ORACLE_CROSSINGS {
        return Err(Error::SizeCap(format!(
            "{m} crossings exceeds the oracle cap of {MAX_ORACLE_CROSSINGS}"
        )));
    }
    let k = constants();
    let a = k.big_a;
    let a_inv = a.powi(-1);
    fn go(
        b: &BraidWord,
        depth: usize,
        partial: &PlanarMatching,
        weight: Complex64,
        a: Complex64,
        a_inv: Complex64,
    ) -> Result<Complex64> {
        if depth == b.word().len() {
            return Ok(weight * markov_trace_diagram(partial));
        }
        let g = b.word()[depth];
        let i = g.unsigned_abs() as usize;
        let (w_e, w_id) = if g > 0 { (a, a_inv) } else { (a_inv, a) };
        let with_e = tl_compose(partial, &PlanarMatching::e_generator(b.strands(), i)?)?;
        let left = go(b, depth + 1, &with_e, weight * w_e, a, a_inv)?;
        let right = go(b, depth + 1, partial, weight * w_id, a, a_inv)?;
        Ok(left + right)
    }
    go(
        b,
        0,
        &PlanarMatching::identity(b.strands()),
        Complex64::new(1.0, 0.0),
        a,
        a_inv,
    )
}

/// (−A)^{3w} · D^{n−1} · Tr(ρ_A(b)): the Jones value by state sum.
pub fn oracle_jones(b: &BraidWord) -> Result<Complex64> {
    let k = constants();
    let trace = oracle_trace(b)?;
    let prefactor = (-k.big_a).powi(3 * b.writhe() as i32)
        * Complex64::new(k.big_d, 0.0).powi(b.strands() as i32 - 1);
    Ok(prefactor * trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{parse_braid, BraidWord};
    use crate::jones::{jones_value, weighted_trace};

    #[test]
    fn e_squared_absorbs_a_loop() {
        let e1 = PlanarMatching::e_generator(2, 1).unwrap();
        let sq = tl_compose(&e1, &e1).unwrap();
        assert_eq!(sq.pairing(), e1.pairing());
        assert_eq!(sq.loops_absorbed(), 1);
    }

    #[test]
    fn e1_e2_e1_is_e1_without_loops() {
        let e1 = PlanarMatching::e_generator(3, 1).unwrap();
        let e2 = PlanarMatching::e_generator(3, 2).unwrap();
        let prod = tl_compose(&tl_compose(&e1, &e2).unwrap(), &e1).unwrap();
        assert_eq!(prod.pairing(), e1.pairing());
        assert_eq!(prod.loops_absorbed(), 0);
    }

    #[test]
    fn identity_composition_is_identity() {
        let id = PlanarMatching::identity(4);
        let prod = tl_compose(&id, &id).unwrap();
        assert_eq!(prod, id);
    }

    #[test]
    fn markov_trace_examples() {
        let k = constants();
        for n in 1..=10 {
            let v = markov_trace_diagram(&PlanarMatching::identity(n));
            assert!((v - 1.0).norm() < 1e-12, "identity n={n}");
        }
        let e1 = PlanarMatching::e_generator(2, 1).unwrap();
        assert!((markov_trace_diagram(&e1) - 1.0 / k.big_d).norm() < 1e-12);
        let e1e3 = tl_compose(
            &PlanarMatching::e_generator(4, 1).unwrap(),
            &PlanarMatching::e_generator(4, 3).unwrap(),
        )
        .unwrap();
        let expected = Complex64::new(k.big_d, 0.0).powi(-2);
        assert!((markov_trace_diagram(&e1e3) - expected).norm() < 1e-12);
    }

    #[test]
    fn oracle_trace_examples() {
        let k = constants();
        assert!((oracle_trace(&parse_braid("B3:").unwrap()).unwrap() - 1.0).norm() < 1e-12);
        let single = oracle_trace(&parse_braid("B2: 1").unwrap()).unwrap();
        let expected = k.big_a.powi(-1) + k.big_a / k.big_d;
        assert!((single - expected).norm() < 1e-12);
        let trefoil = parse_braid("B2: 1 1 1").unwrap();
        let diff = (oracle_trace(&trefoil).unwrap() - weighted_trace(&trefoil)).norm();
        assert!(diff < 1e-9, "trefoil trace disagreement {diff}");
    }

    #[test]
    fn oracle_jones_examples() {
        assert!((oracle_jones(&parse_braid("B1:").unwrap()).unwrap() - 1.0).norm() < 1e-12);
        assert!((oracle_jones(&parse_braid("B2: 1").unwrap()).unwrap() - 1.0).norm() < 1e-12);
        let trefoil = parse_braid("B2: 1 1 1").unwrap();
        let diff = (oracle_jones(&trefoil).unwrap() - jones_value(&trefoil).value).norm();
        assert!(diff < 1e-9);
    }

    #[test]
    fn inverse_conjugates_the_trace() {
        for text in ["B2: 1 1 1", "B3: 1 2 -1", "B4: 1 2 3 2"] {
            let b = parse_braid(text).unwrap();
            let t = oracle_trace(&b).unwrap();
            let ti = oracle_trace(&b.inverse()).unwrap();
            assert!((ti - t.conj()).norm() < 1e-9, "{text}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let long = BraidWord::new(2, vec![1; 21]).unwrap();
        assert!(matches!(oracle_trace(&long), Err(Error::SizeCap(_))));
    }
}
