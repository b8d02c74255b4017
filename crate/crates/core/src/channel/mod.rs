//! Quantum channels in Kraus form and the Fourier-transform operators they
//! are measured against.

mod choi;
pub mod io;

pub use choi::choi_matrix;

use num_complex::Complex64;

use crate::numerics::{CMatrix, DensityOp, PureState};
use crate::tol::TOL_UNITARY;
use crate::{Error, Result};

/// Largest supported register width (qubits); dimensions reach 2¹⁰ = 1024.
pub const MAX_QUBITS: u32 = 10;

/// Entrywise action tolerance under which two channels are considered equal.
pub const TOL_ACTION: f64 = 1e-9;

/// Modular index arithmetic for an `n`-qubit register of dimension `N = 2ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftSpec {
    n: u32,
    dim: usize,
}

impl ShiftSpec {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::BadRegisterCount { n, max: MAX_QUBITS });
        }
        Ok(ShiftSpec {
            n,
            dim: 1usize << n,
        })
    }

    /// Builds the spec from a dimension, which must be a power of two in
    /// range.
    pub fn from_dim(dim: usize) -> Result<Self> {
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::NotPowerOfTwo { dim });
        }
        ShiftSpec::new(dim.trailing_zeros())
    }

    pub fn qubits(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reduces an arbitrary integer mod `N` into `0..N`.
    pub fn reduce(&self, k: i64) -> usize {
        k.rem_euclid(self.dim as i64) as usize
    }

    /// Negation `-k mod N`.
    pub fn neg(&self, k: usize) -> usize {
        self.reduce(-(k as i64))
    }

    /// Shifted index `k + delta mod N`.
    pub fn add(&self, k: usize, delta: i64) -> usize {
        self.reduce(k as i64 + delta)
    }
}

/// Completely positive trace-preserving map, stored as Kraus operators
/// `{A_i}` with `Σ A_i†A_i = I` within [`TOL_UNITARY`] and at most `dim²`
/// operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    /// Validates and wraps a Kraus family. Families larger than `dim²`
    /// operators are first reduced to a minimal equivalent family via the
    /// Choi spectrum (the action is unchanged).
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::EmptyKraus);
        }
        let dim = ops[0].rows();
        for op in &ops {
            if !op.is_square() {
                return Err(Error::NotSquare {
                    rows: op.rows(),
                    cols: op.cols(),
                });
            }
            if op.rows() != dim {
                return Err(Error::DimMismatch {
                    context: "Kraus operator",
                    expected: dim,
                    found: op.rows(),
                });
            }
        }
        let ops = if ops.len() > dim * dim {
            choi::reduce_kraus(&ops, dim)?
        } else {
            ops
        };
        let chan = KrausChannel { dim, ops };
        chan.check_completeness()?;
        Ok(chan)
    }

    fn check_completeness(&self) -> Result<()> {
        let mut gram = CMatrix::zeros(self.dim, self.dim);
        for op in &self.ops {
            gram = &gram + &op.dagger().matmul(op);
        }
        let mut defect: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let target = if r == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                defect = defect.max((gram[(r, c)] - target).norm());
            }
        }
        if defect > TOL_UNITARY {
            return Err(Error::NotTracePreserving {
                defect,
                tol: TOL_UNITARY,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of Kraus operators (always ≤ `dim²`).
    pub fn rank(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// True when the channel is a single unitary Kraus operator. A singleton
    /// family is automatically unitary: completeness forces `A†A = I`.
    pub fn is_unitary(&self) -> bool {
        self.ops.len() == 1
    }

    /// The unitary matrix, when the channel is unitary.
    pub fn unitary(&self) -> Option<&CMatrix> {
        if self.is_unitary() {
            Some(&self.ops[0])
        } else {
            None
        }
    }

    /// Applies the channel to a density operator: `Σ A ρ A†`.
    pub fn apply(&self, rho: &DensityOp) -> Result<DensityOp> {
        if rho.dim() != self.dim {
            return Err(Error::DimMismatch {
                context: "channel apply",
                expected: self.dim,
                found: rho.dim(),
            });
        }
        DensityOp::new_channel_output(self.apply_matrix(rho.matrix()))
    }

    /// Linear extension of the channel to an arbitrary operator `M ↦ Σ A M A†`.
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        assert_eq!(m.rows(), self.dim, "apply_matrix dimension mismatch");
        assert_eq!(m.cols(), self.dim, "apply_matrix dimension mismatch");
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for a in &self.ops {
            out = &out + &a.matmul(m).matmul(&a.dagger());
        }
        out
    }

    /// Channel applied to the rank-one operator `|v⟩⟨w|`: `Σ (A v)(A w)†`.
    ///
    /// `v` and `w` need not be normalized; the result is generally not
    /// Hermitian when `v ≠ w`.
    pub fn apply_outer(&self, v: &[Complex64], w: &[Complex64]) -> CMatrix {
        assert_eq!(v.len(), self.dim, "apply_outer dimension mismatch");
        assert_eq!(w.len(), self.dim, "apply_outer dimension mismatch");
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for a in &self.ops {
            let av = a.matvec(v);
            let aw = a.matvec(w);
            for r in 0..self.dim {
                if av[r].norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..self.dim {
                    out[(r, c)] += av[r] * aw[c].conj();
                }
            }
        }
        out
    }
}

/// Entrywise distance between the actions of two channels, maximized over
/// all matrix units `|i⟩⟨j|`. Channel equality is action equality, so this
/// is the canonical metric for comparing Kraus families that may differ as
/// families but agree as maps.
pub fn action_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            context: "action_distance",
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let n = a.dim();
    let mut unit_v = vec![Complex64::new(0.0, 0.0); n];
    let mut unit_w = vec![Complex64::new(0.0, 0.0); n];
    let mut worst: f64 = 0.0;
    for i in 0..n {
        unit_v[i] = Complex64::new(1.0, 0.0);
        for j in 0..n {
            unit_w[j] = Complex64::new(1.0, 0.0);
            let ca = a.apply_outer(&unit_v, &unit_w);
            let cb = b.apply_outer(&unit_v, &unit_w);
            worst = worst.max(ca.max_abs_diff(&cb));
            unit_w[j] = Complex64::new(0.0, 0.0);
        }
        unit_v[i] = Complex64::new(0.0, 0.0);
    }
    Ok(worst)
}

/// True when the two channels have the same action within [`TOL_ACTION`].
pub fn channels_equal(a: &KrausChannel, b: &KrausChannel) -> bool {
    a.dim() == b.dim() && action_distance(a, b).expect("dims checked") <= TOL_ACTION
}

/// Composition `outer ∘ inner` (apply `inner` first). The product family
/// `{B_j A_i}` is formed directly when it stays within `dim²` operators;
/// otherwise the composition goes through transfer matrices and the Choi
/// spectrum to produce a minimal family.
pub fn compose(outer: &KrausChannel, inner: &KrausChannel) -> Result<KrausChannel> {
    if outer.dim() != inner.dim() {
        return Err(Error::DimMismatch {
            context: "compose",
            expected: outer.dim(),
            found: inner.dim(),
        });
    }
    let dim = outer.dim();
    if outer.rank() * inner.rank() <= dim * dim {
        let mut ops = Vec::with_capacity(outer.rank() * inner.rank());
        for b in outer.ops() {
            for a in inner.ops() {
                ops.push(b.matmul(a));
            }
        }
        KrausChannel::new(ops)
    } else {
        let t = choi::transfer_matrix(outer.ops(), dim)
            .matmul(&choi::transfer_matrix(inner.ops(), dim));
        let j = choi::choi_from_transfer(&t, dim);
        KrausChannel::new(choi::kraus_from_choi(&j, dim)?)
    }
}

/// Iterated self-composition `c^p` for `p` in `1..=3`.
pub fn channel_power(c: &KrausChannel, p: u32) -> Result<KrausChannel> {
    if !(1..=3).contains(&p) {
        return Err(Error::BadParam {
            name: "p",
            reason: format!("channel power {p} outside supported range 1..=3"),
        });
    }
    let mut acc = c.clone();
    for _ in 1..p {
        acc = compose(&acc, c)?;
    }
    Ok(acc)
}

/// Extends a channel to act on the left factor of a larger register:
/// `C ⊗ Id` with identity on a `right_dim`-dimensional right factor.
pub fn lift_left(c: &KrausChannel, right_dim: usize) -> KrausChannel {
    assert!(right_dim > 0, "right_dim must be positive");
    let eye = CMatrix::identity(right_dim);
    let ops: Vec<CMatrix> = c.ops().iter().map(|a| a.kron(&eye)).collect();
    KrausChannel {
        dim: c.dim() * right_dim,
        ops,
    }
}

/// Applies `C ⊗ Id` to a density operator on the composite register without
/// materializing the lifted Kraus operators — block arithmetic equivalent to
/// `lift_left(c, right_dim).apply(rho)`, but `right_dim`× cheaper.
pub fn apply_lifted(c: &KrausChannel, right_dim: usize, rho: &DensityOp) -> Result<DensityOp> {
    assert!(right_dim > 0, "right_dim must be positive");
    let n = c.dim();
    let m = right_dim;
    let d = n * m;
    if rho.dim() != d {
        return Err(Error::DimMismatch {
            context: "apply_lifted",
            expected: d,
            found: rho.dim(),
        });
    }
    let src = rho.matrix();
    let mut out = CMatrix::zeros(d, d);
    for a in c.ops() {
        // left = (A ⊗ I) · ρ : output row (i,x) accumulates A[i,k] · row (k,x).
        let mut left = CMatrix::zeros(d, d);
        for i in 0..n {
            for k in 0..n {
                let aik = a[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for x in 0..m {
                    let dst = left.row_mut(i * m + x);
                    let s = src.row(k * m + x);
                    for (o, &v) in dst.iter_mut().zip(s) {
                        *o += aik * v;
                    }
                }
            }
        }
        // out += left · (A† ⊗ I) : column (j,x) sums left col (k,x)·conj A[j,k].
        for r in 0..d {
            let lrow = left.row(r);
            let orow = out.row_mut(r);
            for j in 0..n {
                for k in 0..n {
                    let ajk = a[(j, k)].conj();
                    if ajk.norm_sqr() == 0.0 {
                        continue;
                    }
                    for x in 0..m {
                        orow[j * m + x] += lrow[k * m + x] * ajk;
                    }
                }
            }
        }
    }
    DensityOp::new_channel_output(out)
}

/// Discrete Fourier transform matrix `F_N[j][k] = ω^{jk}/√N`, `ω = e^{2πi/N}`,
/// on `n` qubits.
pub fn qft_matrix(n: u32) -> Result<CMatrix> {
    let spec = ShiftSpec::new(n)?;
    let big_n = spec.dim();
    let scale = 1.0 / (big_n as f64).sqrt();
    let step = 2.0 * std::f64::consts::PI / big_n as f64;
    Ok(CMatrix::from_fn(big_n, big_n, |j, k| {
        // Reduce the exponent mod N before trig for full-precision phases.
        let e = (j * k) % big_n;
        Complex64::from_polar(scale, step * e as f64)
    }))
}

/// Fourier basis state `|k̂⟩ = F_N|k⟩` (column `k` of the QFT matrix).
/// `k` is reduced mod `N`, so negative indices address conjugate modes.
pub fn fourier_basis_state(k: i64, n: u32) -> Result<PureState> {
    let spec = ShiftSpec::new(n)?;
    let big_n = spec.dim();
    let kk = spec.reduce(k);
    let scale = 1.0 / (big_n as f64).sqrt();
    let step = 2.0 * std::f64::consts::PI / big_n as f64;
    let amps: Vec<Complex64> = (0..big_n)
        .map(|j| Complex64::from_polar(scale, step * ((j * kk) % big_n) as f64))
        .collect();
    PureState::new(amps)
}

/// Diagonal phase unitary `U_k = ⊗_{l=1..n} diag(1, e^{2πik/2^l})`, which
/// acts as `U_k|j⟩ = ω^{kj}|j⟩` and maps the uniform superposition to `|k̂⟩`.
/// `k` is reduced mod `N`.
pub fn phase_unitary(k: i64, n: u32) -> Result<CMatrix> {
    let spec = ShiftSpec::new(n)?;
    let kk = spec.reduce(k) as f64;
    let mut u = CMatrix::identity(1);
    for l in 1..=n {
        let phase = 2.0 * std::f64::consts::PI * kk / (1u64 << l) as f64;
        let factor = CMatrix::diag(&[
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, phase),
        ]);
        u = u.kron(&factor);
    }
    Ok(u)
}

/// Real Hadamard transform `H^{⊗n}`, which exchanges `|0ⁿ⟩` and the uniform
/// superposition.
pub fn hadamard_transform(n: u32) -> Result<CMatrix> {
    ShiftSpec::new(n)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_fn(2, 2, |i, j| {
        let sign = if i == 1 && j == 1 { -r } else { r };
        Complex64::new(sign, 0.0)
    });
    let mut acc = CMatrix::identity(1);
    for _ in 0..n {
        acc = acc.kron(&h);
    }
    Ok(acc)
}

/// Index-reflection unitary channel `|k⟩ ↦ |-k mod N⟩` (equal to `F_N²`).
pub fn reflection_channel(n: u32) -> Result<KrausChannel> {
    let spec = ShiftSpec::new(n)?;
    let big_n = spec.dim();
    let mut r = CMatrix::zeros(big_n, big_n);
    for k in 0..big_n {
        r[(spec.neg(k), k)] = Complex64::new(1.0, 0.0);
    }
    unitary_channel(&r)
}

/// Wraps a unitary matrix as a single-operator channel.
pub fn unitary_channel(u: &CMatrix) -> Result<KrausChannel> {
    u.check_unitary(TOL_UNITARY)?;
    Ok(KrausChannel {
        dim: u.rows(),
        ops: vec![u.clone()],
    })
}

/// The ideal inverse-QFT channel on `n` qubits.
pub fn inverse_qft_channel(n: u32) -> Result<KrausChannel> {
    unitary_channel(&qft_matrix(n)?.dagger())
}

/// The ideal QFT channel on `n` qubits.
pub fn qft_channel(n: u32) -> Result<KrausChannel> {
    unitary_channel(&qft_matrix(n)?)
}

impl DensityOp {
    /// Constructor for channel outputs: hermiticity is held to the standard
    /// tolerance, but the trace check is relaxed to the completeness defect a
    /// validated channel may carry (up to [`crate::tol::TOL_PSD`]), since
    /// `Tr(Σ AρA†) = 1` only up to `|ΣA†A - I|`.
    pub(crate) fn new_channel_output(mat: CMatrix) -> Result<DensityOp> {
        mat.check_hermitian(crate::tol::TOL_HERM)?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > crate::tol::TOL_PSD || tr.im.abs() > crate::tol::TOL_PSD {
            return Err(Error::BadTrace {
                trace: tr.re,
                tol: crate::tol::TOL_PSD,
            });
        }
        DensityOp::new_unchecked(mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shift_spec_arithmetic() {
        let s = ShiftSpec::new(3).unwrap();
        assert_eq!(s.dim(), 8);
        assert_eq!(s.reduce(-1), 7);
        assert_eq!(s.reduce(19), 3);
        assert_eq!(s.neg(0), 0);
        assert_eq!(s.neg(3), 5);
        assert_eq!(s.add(6, 5), 3);
        assert!(ShiftSpec::new(0).is_err());
        assert!(ShiftSpec::new(11).is_err());
        assert!(ShiftSpec::from_dim(12).is_err());
        assert_eq!(ShiftSpec::from_dim(16).unwrap().qubits(), 4);
    }

    #[test]
    fn qft_single_qubit_is_hadamard() {
        let f = qft_matrix(1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f[(0, 0)] - c(r, 0.0)).norm() < 1e-15);
        assert!((f[(0, 1)] - c(r, 0.0)).norm() < 1e-15);
        assert!((f[(1, 0)] - c(r, 0.0)).norm() < 1e-15);
        assert!((f[(1, 1)] - c(-r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn qft_two_qubits_has_quarter_phases() {
        let f = qft_matrix(2).unwrap();
        // F[j][k] = i^{jk} / 2.
        assert!((f[(1, 1)] - c(0.0, 0.5)).norm() < 1e-15);
        assert!((f[(2, 2)] - c(0.5, 0.0)).norm() < 1e-15); // i⁴ = 1
        assert!((f[(3, 1)] - c(0.0, -0.5)).norm() < 1e-15); // i³ = -i
        f.expect_unitary().unwrap();
    }

    #[test]
    fn qft_is_unitary_and_fourth_power_is_identity() {
        for n in 1..=5 {
            let f = qft_matrix(n).unwrap();
            assert!(f.unitary_defect() < TOL_UNITARY, "n={n}");
            let f2 = f.matmul(&f);
            let f4 = f2.matmul(&f2);
            let eye = CMatrix::identity(f.rows());
            assert!(f4.max_abs_diff(&eye) < 1e-12, "F⁴ ≠ I at n={n}");
            // F² is the index reflection.
            let refl = reflection_channel(n).unwrap();
            assert!(f2.max_abs_diff(refl.unitary().unwrap()) < 1e-12, "F² ≠ R at n={n}");
        }
    }

    #[test]
    fn fourier_basis_state_is_qft_column() {
        let f = qft_matrix(3).unwrap();
        for k in 0..8i64 {
            let state = fourier_basis_state(k, 3).unwrap();
            for j in 0..8 {
                assert!((state.amps()[j] - f[(j, k as usize)]).norm() < 1e-15);
            }
        }
        // k reduced mod N: -1 ≡ 7.
        let a = fourier_basis_state(-1, 3).unwrap();
        let b = fourier_basis_state(7, 3).unwrap();
        assert!(a.inner(&b).norm() > 1.0 - 1e-12);
        // k = 0 is the uniform superposition.
        let zero = fourier_basis_state(0, 2).unwrap();
        for amp in zero.amps() {
            assert!((amp - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn phase_unitary_is_diagonal_power_of_omega() {
        // U_k|j⟩ = ω^{kj}|j⟩ for the tensor-product construction.
        for (n, k) in [(2u32, 1i64), (3, 5), (3, -2), (4, 9)] {
            let spec = ShiftSpec::new(n).unwrap();
            let u = phase_unitary(k, n).unwrap();
            let big_n = spec.dim();
            let step = 2.0 * std::f64::consts::PI / big_n as f64;
            let kk = spec.reduce(k);
            for j in 0..big_n {
                let expect = Complex64::from_polar(1.0, step * ((kk * j) % big_n) as f64);
                assert!((u[(j, j)] - expect).norm() < 1e-12, "n={n} k={k} j={j}");
                for i in 0..big_n {
                    if i != j {
                        assert!(u[(i, j)].norm() < 1e-15);
                    }
                }
            }
            u.expect_unitary().unwrap();
        }
    }

    #[test]
    fn phase_unitary_maps_uniform_to_fourier_state() {
        for (n, k) in [(1u32, 1i64), (2, 1), (2, 3), (3, 6)] {
            let u = phase_unitary(k, n).unwrap();
            let uniform = PureState::uniform(1 << n);
            let moved = uniform.transformed(&u).unwrap();
            let target = fourier_basis_state(k, n).unwrap();
            assert!(
                (moved.inner(&target).norm() - 1.0).abs() < 1e-12,
                "U_k|+..+⟩ ≠ |k̂⟩ for n={n}, k={k}"
            );
        }
    }

    #[test]
    fn phase_unitary_negation_is_adjoint() {
        let u = phase_unitary(3, 3).unwrap();
        let u_neg = phase_unitary(-3, 3).unwrap();
        assert!(u.dagger().max_abs_diff(&u_neg) < 1e-12);
    }

    #[test]
    fn reflection_squares_to_identity() {
        let r = reflection_channel(3).unwrap();
        let r2 = compose(&r, &r).unwrap();
        let eye = unitary_channel(&CMatrix::identity(8)).unwrap();
        assert!(channels_equal(&r2, &eye));
    }

    #[test]
    fn unitary_channel_rejects_non_unitary() {
        let m = CMatrix::identity(2).scale(c(1.1, 0.0));
        assert!(unitary_channel(&m).is_err());
    }

    #[test]
    fn kraus_validation_rejects_incomplete_family() {
        let half = CMatrix::identity(2).scale(c(0.9, 0.0));
        assert!(KrausChannel::new(vec![half]).is_err());
        assert!(KrausChannel::new(vec![]).is_err());
    }

    #[test]
    fn oversized_family_is_reduced_without_changing_action() {
        // Five copies of I/√5 on a qubit: r = 5 > dim² = 4.
        let scaled = CMatrix::identity(2).scale(c(1.0 / 5.0f64.sqrt(), 0.0));
        let chan = KrausChannel::new(vec![scaled; 5]).unwrap();
        assert!(chan.rank() <= 4);
        let eye = unitary_channel(&CMatrix::identity(2)).unwrap();
        assert!(channels_equal(&chan, &eye));
    }

    #[test]
    fn apply_conjugates_by_unitary() {
        let mut r = rng::substream(5, "chan-apply", 0);
        let u = rng::random_unitary(4, &mut r);
        let chan = unitary_channel(&u).unwrap();
        let rho = rng::random_density(4, &mut r);
        let moved = chan.apply(&rho).unwrap();
        let expect = u.matmul(rho.matrix()).matmul(&u.dagger());
        assert!(moved.matrix().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn compose_of_unitaries_is_product_unitary() {
        let mut r = rng::substream(6, "chan-compose", 0);
        let u = rng::random_unitary(4, &mut r);
        let v = rng::random_unitary(4, &mut r);
        let uv = compose(
            &unitary_channel(&u).unwrap(),
            &unitary_channel(&v).unwrap(),
        )
        .unwrap();
        let direct = unitary_channel(&u.matmul(&v)).unwrap();
        assert!(channels_equal(&uv, &direct));
    }

    #[test]
    fn channel_power_matches_repeated_compose() {
        let mut r = rng::substream(7, "chan-power", 0);
        let u = rng::random_unitary(3, &mut r);
        let chan = unitary_channel(&u).unwrap();
        let cubed = channel_power(&chan, 3).unwrap();
        let direct = unitary_channel(&u.matmul(&u).matmul(&u)).unwrap();
        assert!(channels_equal(&cubed, &direct));
        assert!(channel_power(&chan, 0).is_err());
        assert!(channel_power(&chan, 4).is_err());
    }

    #[test]
    fn lift_left_acts_as_identity_on_right_factor() {
        let mut r = rng::substream(8, "chan-lift", 0);
        let u = rng::random_unitary(2, &mut r);
        let chan = unitary_channel(&u).unwrap();
        let lifted = lift_left(&chan, 3);
        assert_eq!(lifted.dim(), 6);

        let rho_a = rng::random_density(2, &mut r);
        let rho_b = rng::random_density(3, &mut r);
        let joint = crate::numerics::tensor(&rho_a, &rho_b);
        let moved = lifted.apply(&joint).unwrap();
        let expect = crate::numerics::tensor(&chan.apply(&rho_a).unwrap(), &rho_b);
        assert!(moved.matrix().max_abs_diff(expect.matrix()) < 1e-12);
    }

    #[test]
    fn apply_lifted_matches_materialized_lift() {
        let mut r = rng::substream(9, "chan-lift-fast", 0);
        // A genuinely non-unitary channel: qubit depolarizing-style mix.
        let p: f64 = 0.3;
        let keep = CMatrix::identity(2).scale(c((1.0 - p).sqrt(), 0.0));
        let mut flips = Vec::new();
        for (i, j) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
            let mut m = CMatrix::zeros(2, 2);
            m[(i, j)] = c((p / 2.0).sqrt(), 0.0);
            flips.push(m);
        }
        let mut ops = vec![keep];
        ops.extend(flips);
        // ΣA†A = (1-p)I + p/2·(E00†E00+E01†E01+E10†E10+E11†E11) = I.
        let chan = KrausChannel::new(ops).unwrap();

        let rho = rng::random_density(6, &mut r);
        let fast = apply_lifted(&chan, 3, &rho).unwrap();
        let slow = lift_left(&chan, 3).apply(&rho).unwrap();
        assert!(fast.matrix().max_abs_diff(slow.matrix()) < 1e-12);
    }

    #[test]
    fn action_distance_separates_distinct_channels() {
        let eye = unitary_channel(&CMatrix::identity(4)).unwrap();
        let f = qft_channel(2).unwrap();
        assert!(action_distance(&eye, &f).unwrap() > 0.1);
        assert!(channels_equal(&f, &f));
    }
}
