//! Deterministic randomness: named, independently seeded substreams.
//!
//! Every random draw in the crate flows from an explicit 64-bit root seed
//! through [`substream`], which derives an independent ChaCha8 stream from
//! `(seed, label, index)`. Substreams make sampling order-independent: shot
//! `i` of a protocol sees the same randomness whether shots are generated
//! one by one or in chunks, and inserting a new consumer of randomness never
//! shifts the draws of existing ones.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::numerics::{herm_eig, CMatrix, DensityOp, PureState};

/// SplitMix64 finalizer; the standard 64-bit avalanche mix.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a hash of a label string.
fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Derives a child seed from `(seed, label, index)`.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    let mut z = splitmix64(seed);
    z = splitmix64(z ^ fnv1a(label));
    splitmix64(z ^ index)
}

/// Independent deterministic random stream for `(seed, label, index)`.
pub fn substream(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, label, index))
}

/// Standard normal deviate (Box–Muller; consumes two uniforms).
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Map [0,1) to (0,1] so the logarithm is finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Complex standard normal deviate (real and imaginary parts independent
/// N(0, 1)).
pub fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// Haar-like random pure state: normalized vector of complex normals.
pub fn random_state(dim: usize, rng: &mut ChaCha8Rng) -> PureState {
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
        if let Ok(s) = PureState::normalized(amps) {
            return s;
        }
        // Astronomically unlikely zero draw; redraw.
    }
}

/// Haar-distributed random unitary via modified Gram–Schmidt on a complex
/// Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    loop {
        let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
        if let Some(u) = gram_schmidt(&g) {
            return u;
        }
    }
}

fn gram_schmidt(g: &CMatrix) -> Option<CMatrix> {
    let n = g.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|c| (0..n).map(|r| g[(r, c)]).collect())
        .collect();
    for k in 0..n {
        // Orthogonalize against columns 0..k twice for numerical robustness.
        for _ in 0..2 {
            for j in 0..k {
                let proj: Complex64 = cols[j]
                    .iter()
                    .zip(&cols[k])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let prev = cols[j].clone();
                for (x, p) in cols[k].iter_mut().zip(&prev) {
                    *x -= proj * p;
                }
            }
        }
        let norm = cols[k].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None; // Degenerate draw; caller retries.
        }
        let inv = 1.0 / norm;
        for x in &mut cols[k] {
            *x *= inv;
        }
    }
    Some(CMatrix::from_fn(n, n, |r, c| cols[c][r]))
}

/// Random full-rank density operator: `G·G† / Tr(G·G†)` with Gaussian `G`.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityOp {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let w = g.matmul(&g.dagger());
    let tr = w.trace().re;
    let m = w.scale(Complex64::new(1.0 / tr, 0.0));
    // Symmetrize away the last bits of roundoff before validation.
    let sym = CMatrix::from_fn(dim, dim, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    DensityOp::new(sym).expect("Wishart-normalized matrix is a density operator")
}

/// Random Hermitian matrix with unit operator norm (GUE draw, symmetrized,
/// rescaled so the largest |eigenvalue| is 1).
pub fn random_hermitian_unit_norm(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let h = CMatrix::from_fn(dim, dim, |r, c| (g[(r, c)] + g[(c, r)].conj()) * 0.5);
    let (eigs, _) = herm_eig(&h).expect("symmetrized matrix is Hermitian");
    let top = eigs
        .iter()
        .map(|e| e.abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    h.scale(Complex64::new(1.0 / top, 0.0))
}

/// Random orthonormal basis (columns of a Haar unitary).
pub fn random_basis(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    random_unitary(dim, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::TOL_UNITARY;

    #[test]
    fn substreams_are_deterministic_and_labeled() {
        let mut a = substream(42, "shot", 7);
        let mut b = substream(42, "shot", 7);
        assert_eq!(a.gen::<u64>(), b.gen::<u64>());

        let mut c = substream(42, "shot", 8);
        let mut d = substream(42, "other", 7);
        let base = substream(42, "shot", 7).gen::<u64>();
        assert_ne!(base, c.gen::<u64>());
        assert_ne!(base, d.gen::<u64>());
    }

    #[test]
    fn derive_seed_disperses_small_changes() {
        let s = derive_seed(1, "x", 0);
        assert_ne!(s, derive_seed(2, "x", 0));
        assert_ne!(s, derive_seed(1, "y", 0));
        assert_ne!(s, derive_seed(1, "x", 1));
    }

    #[test]
    fn standard_normal_moments_are_sane() {
        let mut r = substream(7, "normal", 0);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = standard_normal(&mut r);
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var - 1.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut r = substream(11, "unitary", 0);
        for dim in [2, 3, 8] {
            let u = random_unitary(dim, &mut r);
            assert!(u.unitary_defect() < TOL_UNITARY, "dim {dim}");
        }
    }

    #[test]
    fn random_density_is_valid() {
        let mut r = substream(13, "density", 0);
        let rho = random_density(5, &mut r);
        rho.check_psd().unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_hermitian_has_unit_operator_norm() {
        let mut r = substream(17, "herm", 0);
        let h = random_hermitian_unit_norm(6, &mut r);
        h.expect_hermitian().unwrap();
        let (eigs, _) = herm_eig(&h).unwrap();
        let top = eigs.iter().map(|e| e.abs()).fold(0.0f64, f64::max);
        assert!((top - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_state_is_normalized() {
        let mut r = substream(19, "state", 0);
        let s = random_state(9, &mut r);
        let norm: f64 = s.amps().iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
