//! Small dense complex-matrix helpers. Dimensions here stay at desk scale,
//! so plain loops beat pulling in a BLAS backend.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

pub fn identity_like(dim: usize) -> Array2<Complex64> {
    let mut m = Array2::zeros((dim, dim));
    for i in 0..dim {
        m[(i, i)] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn mat_mul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, k) = a.dim();
    let (k2, m) = b.dim();
    assert_eq!(k, k2, "inner dimensions must agree");
    let mut out = Array2::zeros((n, m));
    for i in 0..n {
        for l in 0..k {
            let ail = a[(i, l)];
            if ail == Complex64::default() {
                continue;
            }
            for j in 0..m {
                out[(i, j)] += ail * b[(l, j)];
            }
        }
    }
    out
}

pub fn adjoint(a: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, m) = a.dim();
    let mut out = Array2::zeros((m, n));
    for i in 0..n {
        for j in 0..m {
            out[(j, i)] = a[(i, j)].conj();
        }
    }
    out
}

/// Largest entry magnitude of a − b.
pub fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Residual of U†U against the identity, as a max entry magnitude.
pub fn unitarity_residual(u: &Array2<Complex64>) -> f64 {
    let prod = mat_mul(&adjoint(u), u);
    max_abs_diff(&prod, &identity_like(u.dim().0))
}

pub fn is_unitary(u: &Array2<Complex64>, tol: f64) -> bool {
    u.dim().0 == u.dim().1 && unitarity_residual(u) <= tol
}

pub fn mat_trace(a: &Array2<Complex64>) -> Complex64 {
    (0..a.dim().0.min(a.dim().1)).map(|i| a[(i, i)]).sum()
}

/// Haar-ish random unitary: complex Gaussian matrix, then modified
/// Gram-Schmidt. Good enough as a test-vector source at these dimensions.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> Array2<Complex64> {
    let gauss = |rng: &mut R| {
        // Box-Muller keeps us off extra dependencies.
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(gauss(rng), gauss(rng)))
                .collect()
        })
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: Complex64 = (0..dim).map(|r| cols[k][r].conj() * cols[j][r]).sum();
            for r in 0..dim {
                let v = cols[k][r];
                cols[j][r] -= proj * v;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for r in 0..dim {
            cols[j][r] /= norm;
        }
    }
    let mut out = Array2::zeros((dim, dim));
    for j in 0..dim {
        for r in 0..dim {
            out[(r, j)] = cols[j][r];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2, 5, 8] {
            let u = random_unitary(dim, &mut rng);
            assert!(is_unitary(&u, 1e-10), "dim {dim}");
        }
    }

    #[test]
    fn mat_mul_against_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(4, &mut rng);
        assert!(max_abs_diff(&mat_mul(&u, &identity_like(4)), &u) < 1e-15);
    }
}
